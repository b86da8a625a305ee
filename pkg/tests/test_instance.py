import json

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hcsp.evaluation import Solution, check_feasibility
from hcsp.instance import (Caregiver, Instance, InstanceError, Service, dumps, from_dict, generate_instance,
                           generate_suite, load_instance, save_instance, to_dict)


def _one(**kw) -> Instance:
    s = Service(1, kw.get("duration", 60), 1, kw.get("hard", (0, 240)), kw.get("soft", (60, 180)))
    c = Caregiver(1, {1: (0, 600)}, {1: kw.get("cap", 480)}, 2400, {1: 3})
    return Instance((s,), (c,), ((0,),))


def test_valid_single_service():
    inst = _one()
    assert inst.n_services == 1 and inst.compatible(1) == [1]
    assert inst.theta(0, 1) == 0 and inst.theta(1, 0) == 0


def test_penalization_piecewise():
    s = Service(1, 60, 1, (0, 600), (120, 300))
    assert s.penalization(120) == 0
    assert s.penalization(90) == 30
    assert s.penalization(270) == 30
    assert s.penalization(240) == 0


def test_foreign_day_windows_degenerate():
    s = Service(1, 60, 3, (0, 600), (120, 300))
    assert s.hard_on(3) == (0, 600)
    assert s.hard_on(2) == (0, 0) and s.soft_on(2) == (0, 0)


@pytest.mark.parametrize("kw, fragment", [
    (dict(soft=(-10, 100)), "soft_window"),
    (dict(soft=(100, 300)), "soft_window"),
    (dict(duration=300), "duration"),
    (dict(cap=700), "daily_max"),
])
def test_invalid_fields_reported(kw, fragment):
    with pytest.raises(InstanceError) as err:
        _one(**kw)
    assert any(fragment in v for v in err.value.violations)


def test_bad_travel_shape():
    s = Service(1, 60, 1, (0, 240), (60, 180))
    c = Caregiver(1, {1: (0, 600)}, {1: 480}, 2400, {1: 0})
    with pytest.raises(InstanceError, match="travel"):
        Instance((s,), (c,), ((0, 0),))


def test_from_dict_collects_all_errors():
    data = to_dict(_one())
    data["services"][0]["duration"] = "long"
    data["caregivers"][0]["weekly_agreed"] = 1.5
    with pytest.raises(InstanceError) as err:
        from_dict(data)
    assert len(err.value.violations) >= 2


def test_round_trip_file(tmp_path):
    inst = generate_instance(8, 3, seed=5)
    path = tmp_path / "i.json"
    save_instance(inst, path)
    back = load_instance(path)
    assert dumps(back) == dumps(inst)
    assert json.loads(path.read_text())["services"][0]["id"] == 1


def test_generator_deterministic():
    assert dumps(generate_instance(10, 3, 11)) == dumps(generate_instance(10, 3, 11))
    assert dumps(generate_instance(10, 3, 11)) != dumps(generate_instance(10, 3, 12))


def test_generator_tiny_profile_on_grid():
    inst = generate_instance(5, 2, 3, profile="tiny")
    for s in inst.services:
        assert s.duration % 15 == 0
        assert all(v % 15 == 0 for v in s.hard_window + s.soft_window)


def test_generator_clamps_size_with_warning():
    with pytest.warns(UserWarning):
        inst = generate_instance(0, 0, 1)
    assert inst.n_services == 1 and inst.n_caregivers == 1


def test_generator_reports_overfull_request():
    with pytest.raises(InstanceError, match="do not fit"):
        generate_instance(40, 1, 0)


def test_suite_layout():
    suite = generate_suite(sizes=(10,), count=3, seed=2)
    assert sorted(suite) == ["10_01", "10_02", "10_03"]
    assert all(i.n_services == 10 for i in suite.values())


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 12), m=st.integers(1, 4), seed=st.integers(0, 10_000))
def test_generated_instances_have_planted_witness(n, m, seed):
    assume(n <= 4 * m)
    inst = generate_instance(n, m, seed)
    assert from_dict(json.loads(dumps(inst))) == inst
    witness = inst.meta.get("witness")
    assert witness is not None
    sol = Solution.from_dict(inst, witness)
    assert check_feasibility(sol) == []
