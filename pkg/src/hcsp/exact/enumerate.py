"""Exhaustive enumeration over assignments, orders and grid start times.

Meant for desk-scale instances (a handful of services).  Start times are
restricted to multiples of ``step`` minutes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from ..archive import ParetoArchive
from ..evaluation import ObjectiveWeights, Route, Solution
from ..instance import Instance
from .backends import Point


class EnumerationTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class DayOption:
    paid: int
    pen: int
    order: tuple[int, ...]
    starts: tuple[int, ...]


def _pareto(items, key):
    """Items whose key pair is not weakly dominated by an earlier kept item (sorted output)."""
    out = []
    best2 = None
    for it in sorted(items, key=key):
        b = key(it)[1]
        if best2 is None or b < best2:
            out.append(it)
            best2 = b
    return out


def day_options(inst: Instance, caregiver: int, day: int, services: list[int], step: int) -> dict[frozenset, list[DayOption]]:
    """Pareto (paid, penalization) schedules of every subset of ``services`` on one caregiver-day."""
    cg = inst.caregiver(caregiver)
    result: dict[frozenset, list[DayOption]] = {frozenset(): [DayOption(0, 0, (), ())]}
    if not cg.works(day):
        return result
    g_lo, g_hi = cg.availability[day]
    cap = cg.daily_max[day]
    pi = inst.pi_min
    grid = {}
    for j in services:
        s = inst.service(j)
        lo = max(s.hard_window[0], g_lo)
        hi = min(s.hard_window[1], g_hi) - s.duration
        lo = -(-lo // step) * step
        grid[j] = list(range(lo, hi + 1, step))
    found: dict[frozenset, list[DayOption]] = {}
    labels: dict[tuple, list[tuple[int, int, int]]] = {}

    def dominated(state, label) -> bool:
        t0, rmax, pen = label
        bucket = labels.setdefault(state, [])
        for a, b, c in bucket:
            if a >= t0 and b >= rmax and c <= pen:
                return True
        bucket[:] = [x for x in bucket if not (t0 >= x[0] and rmax >= x[1] and pen <= x[2])]
        bucket.append(label)
        return False

    def dfs(mask, last, end, t0, rmax, pen, order, starts):
        paid = end - t0 - (rmax if rmax >= pi else 0)
        found.setdefault(mask, []).append(DayOption(paid, pen, order, starts))
        for j in services:
            if j in mask:
                continue
            s = inst.service(j)
            earliest = end + inst.theta(last, j)
            for t in grid[j]:
                if t < earliest:
                    continue
                gap = t - earliest
                r = max(rmax, gap)
                new_end = t + s.duration
                new_paid = new_end - t0 - (r if r >= pi else 0)
                if new_paid > cap:
                    continue
                p = pen + s.penalization(t)
                nmask = mask | {j}
                if dominated((nmask, j, new_end), (t0, r, p)):
                    continue
                dfs(nmask, j, new_end, t0, r, p, order + (j,), starts + (t,))

    for j in services:
        s = inst.service(j)
        for t in grid[j]:
            if s.duration > cap:
                break
            p = s.penalization(t)
            if dominated((frozenset([j]), j, t + s.duration), (t, 0, p)):
                continue
            dfs(frozenset([j]), j, t + s.duration, t, 0, p, (j,), (t,))
    for mask, opts in found.items():
        result[mask] = _pareto(opts, key=lambda o: (o.paid, o.pen, o.starts))
    return result


@dataclass
class Table:
    """Every assignment's own Pareto set of (f1, f2) with witnesses."""

    points: list[tuple[int, int, tuple]]
    instance: Instance

    def solution(self, witness: tuple) -> Solution:
        return Solution(self.instance, [Route(i, d, o.order, o.starts) for (i, d), o in witness if o.order])


def enumerate_table(inst: Instance, step: int = 15, max_services: int = 6,
                    weights: ObjectiveWeights | None = None) -> Table:
    if inst.n_services > max_services:
        raise EnumerationTooLarge(f"{inst.n_services} services exceed the enumeration bound of {max_services}")
    w = weights or ObjectiveWeights.from_instance(inst)
    options = {}
    for c in inst.caregivers:
        for d in inst.days():
            services = [s.id for s in inst.services if s.day == d and c.can_serve(s.id)]
            options[c.id, d] = day_options(inst, c.id, d, services, step)
    choices = []
    for s in inst.services:
        cands = [c.id for c in inst.caregivers if c.can_serve(s.id) and c.works(s.day)]
        choices.append(cands)
    week_cache: dict[tuple, list] = {}

    def caregiver_front(i: int, assigned: frozenset):
        key = (i, assigned)
        if key in week_cache:
            return week_cache[key]
        per_day = []
        for d in inst.days():
            mask = frozenset(j for j in assigned if inst.service(j).day == d)
            opts = options[i, d].get(mask) if mask else [DayOption(0, 0, (), ())]
            if not opts:
                week_cache[key] = None
                return None
            per_day.append([((i, d), o) for o in opts])
        agreed = inst.caregiver(i).weekly_agreed
        combos = []
        for pick in itertools.product(*per_day):
            paid = sum(o.paid for _, o in pick)
            pen = sum(o.pen for _, o in pick)
            f1 = w.w1 * max(0, paid - agreed) + w.w2 * paid
            combos.append((f1, pen, pick))
        front = _pareto(combos, key=lambda x: (x[0], x[1]))
        week_cache[key] = front
        return front

    points = []
    for assign in itertools.product(*choices):
        fronts = []
        aff = 0
        ok = True
        for c in inst.caregivers:
            mine = frozenset(inst.services[k].id for k, i in enumerate(assign) if i == c.id)
            aff += sum(c.affinity_for(j) for j in mine)
            f = caregiver_front(c.id, mine)
            if f is None:
                ok = False
                break
            fronts.append(f)
        if not ok:
            continue
        acc = [(0, 0, ())]
        for f in fronts:
            acc = _pareto([(a1 + b1, a2 + b2, wa + wb) for a1, a2, wa in acc for b1, b2, wb in f],
                          key=lambda x: (x[0], x[1]))
        for f1, pen, wit in acc:
            points.append((f1, w.w3 * aff + w.w4 * pen, wit))
    return Table(points, inst)


def brute_force_front(inst: Instance, time_step: int = 15, max_services: int = 6) -> ParetoArchive:
    """Exact Pareto front of the problem with start times on a ``time_step`` grid."""
    table = enumerate_table(inst, time_step, max_services)
    arc = ParetoArchive()
    for f1, f2, wit in sorted(table.points, key=lambda p: (p[0], p[1])):
        if not arc.dominated((f1, f2)):
            arc.update((f1, f2), table.solution(wit), tag="enumeration")
    return arc


class EnumerationBackend:
    """Answers the exact-method subproblems by scanning an enumeration table."""

    name = "enumeration"

    def __init__(self, instance: Instance, step: int = 15, max_services: int = 6):
        self.instance = instance
        self.table = enumerate_table(instance, step, max_services)
        self.solves = 0

    def _point(self, p) -> Point:
        return Point(p[0], p[1], self.table.solution(p[2]))

    def lexicographic(self, direction: str) -> Point | None:
        self.solves += 1
        if not self.table.points:
            return None
        key = (lambda p: (p[1], p[0])) if direction == "wc" else (lambda p: (p[0], p[1]))
        return self._point(min(self.table.points, key=key))

    def epsilon(self, e2: Fraction, eps: Fraction, r2: int) -> Point | None:
        self.solves += 1
        best = None
        for p in self.table.points:
            if p[1] > e2:
                continue
            val = Fraction(p[0]) - eps * (e2 - p[1]) / max(1, r2)
            if best is None or (val, p[0], p[1]) < best[0]:
                best = ((val, p[0], p[1]), p)
        return None if best is None else self._point(best[1])
