import io
import json

import pytest

from hcsp.bialns import PRESETS, BialnsConfig, bialns, preset
from hcsp.evaluation import check_feasibility, dominates, evaluate
from hcsp.instance import Caregiver, Instance, Service, generate_instance

SMALL = dict(n=40, nroutes=15, nalns=3, nsols=150)


def test_presets_match_published_parameters():
    rw = preset("real-week")
    assert (rw.nroutes, rw.nalns, rw.nsols) == (10_000, 1, 300_000)
    assert str(rw.pr) == "1%" and str(rw.p) == "auto_1%"
    assert rw.step1_time_limit == 5400
    s10, s15 = preset("solomon-10"), preset("solomon-15")
    assert (s10.nroutes, s10.nalns, s10.nsols, str(s10.pr)) == (6000, 5, 200_000, "auto_5%")
    assert (s15.nroutes, s15.nalns, s15.nsols, str(s15.pr)) == (8000, 10, 300_000, "auto_10%")
    assert set(PRESETS) == {"solomon-10", "solomon-15", "real-week"}


def test_preset_overrides_and_unknown():
    assert preset("solomon-10", nsols=5).nsols == 5
    with pytest.raises(KeyError):
        preset("weekend")


def test_config_validation():
    with pytest.raises(ValueError):
        BialnsConfig(nroutes=-1)
    with pytest.raises(ValueError):
        BialnsConfig(step=0)
    snap = BialnsConfig(p="auto_50%").snapshot()
    assert snap["p"] == "auto_50%" and json.dumps(snap)


def test_archive_feasible_and_nondominated():
    inst = generate_instance(10, 3, 4, profile="solomon-10")
    res = bialns(inst, BialnsConfig(seed=1, **SMALL))
    front = res.archive.front()
    assert front
    for a in front:
        assert not any(dominates(b, a) for b in front)
    for e in res.archive:
        assert check_feasibility(e.payload) == []
        assert evaluate(e.payload) == e.objectives


def test_deterministic_for_seed():
    inst = generate_instance(8, 2, 5)
    a = bialns(inst, BialnsConfig(seed=3, **SMALL)).archive.front()
    b = bialns(inst, BialnsConfig(seed=3, **SMALL)).archive.front()
    assert a == b


def test_single_service_gives_one_point():
    services = (Service(1, 60, 1, (480, 720), (540, 660)),)
    cg = Caregiver(1, {1: (420, 1020)}, {1: 480}, 2400, {1: 3})
    res = bialns(Instance(services, (cg,), ((0,),)), BialnsConfig(seed=0, **SMALL))
    assert len(res.archive) == 1


def test_progress_log_lines():
    inst = generate_instance(6, 2, 2)
    buf = io.StringIO()
    res = bialns(inst, BialnsConfig(seed=0, **SMALL), log_stream=buf)
    lines = [json.loads(l) for l in buf.getvalue().splitlines()]
    assert [l["step"] for l in lines] == ["initialize", "diversify", "densify"]
    assert lines == res.log


def test_step_time_limits_respected():
    inst = generate_instance(8, 2, 7)
    ticks = iter(range(10_000))
    res = bialns(inst, BialnsConfig(seed=0, n=10, nroutes=10_000, nalns=2, nsols=10_000,
                                    step2_time_limit=3, step3_time_limit=3), clock=lambda: next(ticks))
    assert res.log[1]["iterations"] < 10 and res.log[2]["iterations"] < 10
