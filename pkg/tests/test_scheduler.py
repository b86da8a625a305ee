import pytest

from hcsp.evaluation import Route, Solution, check_feasibility, compute_day_metrics
from hcsp.scheduler import RouteScheduler, compute_bounds, schedule_cost_first, schedule_welfare_first

from conftest import example_instance
from oracles import random_route_instance, route_optimum, with_daily_max

ORDER = (1, 2, 3, 4, 5, 6)


def test_chain_bounds_on_example():
    b = compute_bounds(ORDER, example_instance(), 1, 1)
    assert b.earliest == (0, 120, 180, 240, 450, 540)
    assert b.latest == (180, 270, 450, 600, 720, 780)


def test_bounds_none_when_order_impossible():
    assert compute_bounds((6, 1), example_instance(), 1, 1) is None


def test_example_order_optima():
    inst = example_instance()
    for fn in (schedule_welfare_first, schedule_cost_first):
        route = fn(ORDER, inst, 1, 1)
        m = compute_day_metrics(route, inst)
        assert (m.paid, m.penalization) == (360, 0)


def test_schedule_is_feasible_and_on_grid():
    inst = example_instance()
    sch = RouteScheduler(inst, step=15)
    route, metrics = sch.solve(ORDER, 1, 1, "welfare")
    assert all(t % 15 == 0 for t in route.starts)
    assert check_feasibility(Solution(inst, [route])) == []
    assert metrics == compute_day_metrics(route, inst)


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        RouteScheduler(example_instance()).solve(ORDER, 1, 1, "fastest")


def test_empty_order():
    res = RouteScheduler(example_instance()).solve((), 1, 1, "cost")
    assert res is not None and res[0].services == ()


def test_cache_returns_same_object():
    sch = RouteScheduler(example_instance())
    assert sch.solve(ORDER, 1, 1, "cost") is sch.solve(ORDER, 1, 1, "cost")


def test_daily_max_makes_order_infeasible():
    inst = with_daily_max(example_instance(), 359)
    assert RouteScheduler(inst).solve(ORDER, 1, 1, "cost") is None
    assert RouteScheduler(inst).solve(ORDER, 1, 1, "welfare") is None


def test_welfare_respects_binding_daily_max():
    # the penalty-free schedule is long; a tight cap forces a trade-off
    inst, order = random_route_instance(37)
    free = route_optimum(inst, order, 1, 1)
    tight = with_daily_max(inst, free["welfare"][1] - 60)
    want = route_optimum(tight, order, 1, 1)
    got = RouteScheduler(tight).solve(order, 1, 1, "welfare")
    assert want is not None and got is not None
    assert (got[1].penalization, got[1].paid) == want["welfare"]
    assert got[1].paid <= free["welfare"][1] - 60


@pytest.mark.parametrize("seed", range(40))
def test_matches_oracle(seed):
    inst, order = random_route_instance(seed)
    want = route_optimum(inst, order, 1, 1)
    sch = RouteScheduler(inst)
    w, c = sch.solve(order, 1, 1, "welfare"), sch.solve(order, 1, 1, "cost")
    if want is None:
        assert w is None and c is None
        return
    assert (w[1].penalization, w[1].paid) == want["welfare"]
    assert (c[1].paid, c[1].penalization) == want["cost"]


@pytest.mark.parametrize("seed", range(10))
def test_matches_oracle_on_coarse_grid(seed):
    inst, order = random_route_instance(1000 + seed, max_services=4)
    want = route_optimum(inst, order, 1, 1, step=15)
    got = RouteScheduler(inst, step=15).solve(order, 1, 1, "cost")
    if want is None:
        assert got is None
    else:
        assert (got[1].paid, got[1].penalization) == want["cost"]


def test_routes_are_deterministic():
    inst, order = random_route_instance(6)
    a = RouteScheduler(inst).solve(order, 1, 1, "welfare")[0]
    b = RouteScheduler(inst).solve(order, 1, 1, "welfare")[0]
    assert a == b and isinstance(a, Route)
