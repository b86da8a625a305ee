"""Acceptance suite: one test (or group) per criterion, summarised at the end of the run.

Each check records a line through ``conftest.record``; the terminal summary
prints ``CRITERION k: PASS|FAIL - detail`` for every criterion.
"""
import random
import time

import numpy as np
import pytest

from hcsp.archive import ParetoArchive, nondominated
from hcsp.bialns import BialnsConfig, bialns
from hcsp.cli import main
from hcsp.evaluation import check_feasibility, compute_day_metrics, dominates, evaluate
from hcsp.exact import EnumerationBackend, GridConfig, augmecon2, brute_force_front
from hcsp.indicators import coverage, epsilon, gd, igd, normalize_fronts, report
from hcsp.instance import generate_instance
from hcsp.moves import cost_windows, shift_service, welfare_window
from hcsp.scheduler import RouteScheduler

from conftest import example_solution, record
from oracles import hand_fronts, random_route_instance, route_optimum

from test_evaluation import two_service_day

POS = 3  # service 4 of the six-service example route
SUITE = [generate_instance(5, 2, 500 + k, profile="tiny") for k in range(20)]
QUALITY = dict(n=100, nroutes=100, nalns=5, nsols=1000, step=15)


def pair(route, inst):
    m = compute_day_metrics(route, inst)
    return (m.paid, m.penalization)


def test_criterion_1_break_rule():
    t = time.perf_counter()
    inst, long_gap = two_service_day(172)
    m = compute_day_metrics(long_gap, inst)
    inst, short_gap = two_service_day(119)
    s = compute_day_metrics(short_gap, inst)
    elapsed = time.perf_counter() - t
    ok = (m.span, m.breaks.largest, m.paid) == (635, 172, 463) and s.paid == s.span and elapsed < 1
    record(1, ok, f"gap 172 -> paid {m.paid} of span {m.span}; gap 119 -> paid {s.paid} = span {s.span}; "
                  f"{elapsed * 1000:.1f} ms")
    assert ok


def test_criterion_2_windows_and_breakpoints():
    t = time.perf_counter()
    sol = example_solution()
    w = welfare_window(sol.route((1, 1)), POS, sol.instance)
    elapsed = time.perf_counter() - t
    ok = ((w.max_delay, w.max_advance) == (150, 150) and w.delay_breaks == (120, 150)
          and w.delay_range[1] == 120 and sol.objectives == (570, 30) and elapsed < 1)
    record(2, ok, f"delta_d={w.max_delay} delta_a={w.max_advance} delay breaks {w.delay_breaks} "
                  f"cap {w.delay_range[1]} from {sol.objectives}")
    assert ok


def test_criterion_2_shift_pairs_consistent_with_example_2():
    # These pairs are the ones the example-2 archive {(390,180),(420,120),(450,30)} requires.
    sol = example_solution()
    inst, route = sol.instance, sol.route((1, 1))
    delay, advance = pair(shift_service(route, POS, 90, inst), inst), pair(shift_service(route, POS, -90, inst), inst)
    ok = (delay, advance) == ((450, 30), (420, 120))
    record(2, ok, f"delay 90 -> {delay}, advance 90 -> {advance}")
    assert ok


@pytest.mark.xfail(strict=True, reason="literal pairing (delay->(420,30), advance->(450,120)) contradicts the "
                                       "example-2 archive; the swapped pairs are produced instead")
def test_criterion_2_literal_pairing():
    sol = example_solution()
    inst, route = sol.instance, sol.route((1, 1))
    delay, advance = pair(shift_service(route, POS, 90, inst), inst), pair(shift_service(route, POS, -90, inst), inst)
    ok = (delay, advance) == ((420, 30), (450, 120))
    record(2, ok, f"literal pairing delay->(420,30) advance->(450,120): got {delay}, {advance}")
    assert ok


def test_criterion_3_example_2():
    t = time.perf_counter()
    sol = example_solution()
    inst, route = sol.instance, sol.route((1, 1))
    cw = cost_windows(route, POS, inst)
    pairs = [pair(shift_service(route, POS, d, inst), inst) for d in (60, 180, -30, -120)]
    arc = ParetoArchive([sol.objectives])
    for d in (90, -90, 60, 180, -30, -120):
        arc.update(pair(shift_service(route, POS, d, inst), inst))
    elapsed = time.perf_counter() - t
    ok = (cw["delay_break"][1], cw["advance_break"][1]) == (210, 150) \
        and pairs == [(570, 30), (450, 150), (570, 30), (390, 180)] \
        and arc.front() == [(390, 180), (420, 120), (450, 30)] and elapsed < 1
    record(3, ok, f"delta_d={cw['delay_break'][1]} delta_a={cw['advance_break'][1]} pairs {pairs} "
                  f"archive {arc.front()}")
    assert ok


def test_criterion_4_oracle_equivalence():
    t = time.perf_counter()
    mismatches = []
    for k, inst in enumerate(SUITE):
        got = augmecon2(EnumerationBackend(inst, 15), inst, GridConfig(full=True)).archive.front()
        if set(got) != set(brute_force_front(inst, 15).front()):
            mismatches.append(k)
    elapsed = time.perf_counter() - t
    ok = not mismatches and elapsed < 300
    record(4, ok, f"{len(SUITE) - len(mismatches)}/{len(SUITE)} instances equal; {elapsed:.1f} s")
    assert ok


@pytest.mark.slow
def test_criterion_5_bialns_quality():
    cvs, epss, slowest = [], [], 0.0
    for inst in SUITE:
        ref = brute_force_front(inst, 15).front()
        for seed in range(5):
            t = time.perf_counter()
            a = bialns(inst, BialnsConfig(seed=seed, **QUALITY)).archive.front()
            slowest = max(slowest, time.perf_counter() - t)
            nf = normalize_fronts([ref, a])
            r = report(nf.reference_norm, nf.fronts_norm[1], rf_raw=ref, a_raw=a)
            cvs.append(r.cv)
            epss.append(r.eps)
    cv, eps = float(np.mean(cvs)), float(np.mean(epss))
    ok = cv <= 0.10 and eps <= 0.02 and slowest < 60
    record(5, ok, f"mean CV {cv:.4f} (<= 0.10), mean EPS {eps:.4f} (<= 0.02), slowest run {slowest:.2f} s")
    assert ok


@pytest.mark.slow
def test_criterion_6_feasibility_sweep():
    profiles = {"tiny": 5, "solomon-10": 10, "solomon-15": 15}
    names = list(profiles)
    checked, bad = 0, 0
    for k in range(100):
        prof = names[k % 3]
        inst = generate_instance(profiles[prof], 2 + k % 3, 900 + k, profile=prof)
        for seed in range(5):
            arc = bialns(inst, BialnsConfig(seed=seed, n=10, nroutes=10, nalns=2, nsols=60, step=15)).archive
            for e in arc:
                checked += 1
                if check_feasibility(e.payload) or evaluate(e.payload) != e.objectives:
                    bad += 1
    ok = bad == 0 and checked > 0
    record(6, ok, f"{checked} archive members over 100 instances x 5 seeds, {bad} with violations")
    assert ok


def test_criterion_7_indicators():
    worst = 0.0
    for rf, a, want in hand_fronts():
        got = {"CV": coverage(rf, a), "GD": gd(rf, a), "IGD": igd(rf, a), "EPS": epsilon(rf, a)}
        worst = max(worst, max(abs(got[k] - want[k]) for k in want))
        r = report(rf, rf)
        worst = max(worst, abs(r.cv) + abs(r.gd) + abs(r.igd) + abs(r.eps))
    ok = worst <= 1e-9
    record(7, ok, f"3 hand fronts plus identities, max abs error {worst:.2e}")
    assert ok


def test_criterion_8_determinism(tmp_path):
    assert main(["generate", "--services", "10", "--seed", "42", "--out", str(tmp_path / "g")]) == 0
    inst = tmp_path / "g" / "10_01.json"
    budget = ["--n", "40", "--nroutes", "20", "--nalns", "3", "--nsols", "200"]
    for out in ("a", "b"):
        assert main(["solve", str(inst), "--seed", "42", "--out", str(tmp_path / out)] + budget) == 0
    a, b = (tmp_path / "a" / "front.csv").read_bytes(), (tmp_path / "b" / "front.csv").read_bytes()
    ok = a == b and len(a) > 0
    points = len(a.splitlines()) - 1
    record(8, ok, f"front.csv byte-identical across two runs ({points} points)")
    assert ok


def test_criterion_9_archive_laws():
    failures = 0
    for k in range(1000):
        rng = random.Random(k)
        pts = [(rng.randint(0, 40), rng.randint(-20, 20)) for _ in range(rng.randint(0, 60))]
        arc = ParetoArchive()
        for p in pts:
            arc.update(p)
        front = arc.front()
        naive = sorted({p for p in pts if not any(dominates(q, p) for q in pts)})
        shuffled = list(pts)
        rng.shuffle(shuffled)
        laws = (front == naive and nondominated(shuffled) == front
                and all(a[0] < b[0] and a[1] > b[1] for a, b in zip(front, front[1:]))
                and all(arc.dominated(p) or p in front for p in pts))
        failures += not laws
    ok = failures == 0
    record(9, ok, f"1000 random streams, {failures} law violations")
    assert ok


def test_criterion_10_scheduler_optimality():
    mismatches, infeasible = 0, 0
    for seed in range(200):
        inst, order = random_route_instance(seed)
        want = route_optimum(inst, order, 1, 1)
        sch = RouteScheduler(inst)
        w, c = sch.solve(order, 1, 1, "welfare"), sch.solve(order, 1, 1, "cost")
        if want is None:
            infeasible += 1
            mismatches += w is not None or c is not None
            continue
        mismatches += ((w[1].penalization, w[1].paid) != want["welfare"]
                       or (c[1].paid, c[1].penalization) != want["cost"])
    ok = mismatches == 0
    record(10, ok, f"200 routes ({infeasible} infeasible in both), {mismatches} mismatches with 1-minute oracle")
    assert ok
