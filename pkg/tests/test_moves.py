import random

import pytest

from hcsp.archive import ParetoArchive
from hcsp.evaluation import Solution, check_feasibility, compute_day_metrics
from hcsp.instance import generate_instance
from hcsp.moves import (cost_windows, improve_cost_move, improve_welfare_move, shift_service,
                        welfare_window)

from conftest import example_instance

POS = 3  # service 4 of the example route


def pair(route, inst):
    m = compute_day_metrics(route, inst)
    return (m.paid, m.penalization)


def test_initial_pair(example):
    assert example.objectives == (570, 30)


def test_shift_pushes_only_forced_neighbours(example):
    inst = example.instance
    route = example.route((1, 1))
    later = shift_service(route, POS, 90, inst)
    assert later.starts == (90, 210, 300, 480, 540, 600)
    earlier = shift_service(route, POS, -90, inst)
    assert earlier.starts == (90, 180, 240, 300, 510, 600)


def test_welfare_window(example):
    w = welfare_window(example.route((1, 1)), POS, example.instance)
    assert (w.max_delay, w.max_advance) == (150, 150)
    assert w.delay_breaks == (120, 150)
    assert w.delay_range == (0, 120)
    assert w.advance_breaks == (30, 60, 120, 150)


def test_welfare_shifts(example):
    inst, route = example.instance, example.route((1, 1))
    assert pair(shift_service(route, POS, 90, inst), inst) == (450, 30)
    assert pair(shift_service(route, POS, -90, inst), inst) == (420, 120)


def test_cost_windows(example):
    cw = cost_windows(example.route((1, 1)), POS, example.instance)
    assert cw == {"delay_shrink": (0, 90), "delay_break": (90, 210),
                  "advance_shrink": (0, 120), "advance_break": (60, 150)}


@pytest.mark.parametrize("delta, expected", [(60, (570, 30)), (180, (450, 150)),
                                             (-30, (570, 30)), (-120, (390, 180))])
def test_cost_shifts(example, delta, expected):
    inst, route = example.instance, example.route((1, 1))
    assert pair(shift_service(route, POS, delta, inst), inst) == expected


def test_archive_after_examples(example):
    inst, route = example.instance, example.route((1, 1))
    arc = ParetoArchive([example.objectives])
    for delta in (90, -90, 60, 180, -30, -120):
        arc.update(pair(shift_service(route, POS, delta, inst), inst))
    assert arc.front() == [(390, 180), (420, 120), (450, 30)]


def test_window_ranges_respect_grid(example):
    cw = cost_windows(example.route((1, 1)), POS, example.instance, step=45)
    for lo, hi in cw.values():
        assert lo % 45 == 0 and hi % 45 == 0 and hi >= 45


def test_moves_return_feasible_candidates():
    rng = random.Random(3)
    for seed in range(15):
        inst = generate_instance(8, 2, seed)
        sol = Solution.from_dict(inst, inst.meta["witness"])
        for _ in range(10):
            for cand in improve_welfare_move(sol, rng) + improve_cost_move(sol, rng):
                assert check_feasibility(cand) == []
                assert cand is not sol


def test_welfare_move_never_raises_penalization_of_delay(example):
    rng = random.Random(0)
    for _ in range(50):
        for cand in improve_welfare_move(example, rng):
            r, r0 = cand.route((1, 1)), example.route((1, 1))
            moved = [k for k in range(6) if r.starts[k] != r0.starts[k]]
            if moved and r.starts[moved[0]] > r0.starts[moved[0]]:
                assert cand.total_penalization <= example.total_penalization


def test_moves_deterministic_per_seed(example):
    a = [c.objectives for c in improve_cost_move(example, 11)]
    b = [c.objectives for c in improve_cost_move(example, 11)]
    assert a == b
