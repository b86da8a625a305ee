"""Solutions, derived quantities (breaks, overtime, penalizations) and the two objectives.

f1 (cost) is the paid working time plus weekly overtime; f2 (welfare) is the
negated, weighted affinity plus the soft time window penalization.  Both are
minimized and both are integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .instance import Instance

Key = tuple[int, int]  # (caregiver, day)


class SolutionError(ValueError):
    pass


@dataclass(frozen=True)
class Route:
    caregiver: int
    day: int
    services: tuple[int, ...]
    starts: tuple[int, ...]

    def __post_init__(self):
        if len(self.services) != len(self.starts):
            raise SolutionError("services and starts differ in length")

    @property
    def key(self) -> Key:
        return (self.caregiver, self.day)

    @property
    def day_start(self) -> int | None:
        return self.starts[0] if self.starts else None

    def day_end(self, inst: Instance) -> int | None:
        if not self.services:
            return None
        return self.starts[-1] + inst.service(self.services[-1]).duration

    def __len__(self) -> int:
        return len(self.services)


@dataclass(frozen=True)
class BreakInfo:
    largest: int
    unpaid: bool
    deducted: int
    gap: tuple[int, int] | None


@dataclass(frozen=True)
class RouteMetrics:
    paid: int
    penalization: int
    affinity: int
    breaks: BreakInfo
    span: int


@dataclass(frozen=True)
class ObjectiveWeights:
    w1: int = 1
    w2: int = 1
    w3: int = -1
    w4: int = 1

    @classmethod
    def from_instance(cls, inst: Instance) -> "ObjectiveWeights":
        # One affinity point must outweigh any achievable penalization.
        slack = sum((s.soft_window[0] - s.hard_window[0]) + (s.hard_window[1] - s.soft_window[1])
                    for s in inst.services)
        return cls(w3=-max(1, slack))


def compute_day_metrics(route: Route, inst: Instance) -> RouteMetrics:
    """Break, paid time, penalization and affinity of one caregiver-day."""
    if not route.services:
        return RouteMetrics(0, 0, 0, BreakInfo(0, False, 0, None), 0)
    pi_min = inst.pi_min
    largest, gap_at = 0, None
    pen = aff = 0
    cg = inst.caregiver(route.caregiver)
    prev = None
    for j, t in zip(route.services, route.starts):
        s = inst.service(j)
        pen += s.penalization(t)
        aff += cg.affinity_for(j)
        if prev is not None:
            pj, pt = prev
            g = t - (pt + inst.service(pj).duration + inst.theta(pj, j))
            if g > largest:  # strict: earliest maximal gap wins ties
                largest, gap_at = g, (pj, j)
        prev = (j, t)
    span = route.starts[-1] + inst.service(route.services[-1]).duration - route.starts[0]
    unpaid = largest >= pi_min
    deducted = largest if unpaid else 0
    return RouteMetrics(span - deducted, pen, aff, BreakInfo(largest, unpaid, deducted, gap_at if largest > 0 else None),
                        span)


def paid_time(starts: Iterable[int], durations: Iterable[int], travel_between: Iterable[int], pi_min: int) -> int:
    """Paid time of a day from bare arrays (starts, durations and travel times of consecutive pairs)."""
    starts, durations, travel_between = list(starts), list(durations), list(travel_between)
    if not starts:
        return 0
    gaps = [starts[k + 1] - starts[k] - durations[k] - travel_between[k] for k in range(len(starts) - 1)]
    r = max(gaps, default=0)
    return starts[-1] + durations[-1] - starts[0] - (r if r >= pi_min else 0)


def dominates(a: tuple, b: tuple) -> bool:
    """Pareto dominance for minimization."""
    return all(x <= y for x, y in zip(a, b)) and tuple(a) != tuple(b)


class Solution:
    """Routes plus start times, with incrementally maintained objective totals.

    Routes are keyed by (caregiver, day).  Replacing one route updates the
    totals in constant time, so ``objectives`` is always equal to a full
    re-evaluation.
    """

    __slots__ = ("instance", "weights", "_routes", "_metrics", "_week", "_paid", "_pen", "_aff", "_overtime")

    def __init__(self, instance: Instance, routes: Iterable[Route] = (), weights: ObjectiveWeights | None = None):
        self.instance = instance
        self.weights = weights or ObjectiveWeights.from_instance(instance)
        self._routes: dict[Key, Route] = {}
        self._metrics: dict[Key, RouteMetrics] = {}
        self._week: dict[int, int] = {}
        self._paid = self._pen = self._aff = self._overtime = 0
        for r in routes:
            self.set_route(r)

    # -- mutation -------------------------------------------------------
    def set_route(self, route: Route, metrics: RouteMetrics | None = None) -> None:
        self.remove_route(route.key)
        if not route.services:
            return
        m = metrics or compute_day_metrics(route, self.instance)
        self._routes[route.key] = route
        self._metrics[route.key] = m
        self._pen += m.penalization
        self._aff += m.affinity
        self._shift_week(route.caregiver, m.paid)

    def remove_route(self, key: Key) -> Route | None:
        r = self._routes.pop(key, None)
        if r is None:
            return None
        m = self._metrics.pop(key)
        self._pen -= m.penalization
        self._aff -= m.affinity
        self._shift_week(key[0], -m.paid)
        return r

    def _shift_week(self, caregiver: int, delta: int) -> None:
        agreed = self.instance.caregiver(caregiver).weekly_agreed
        old = self._week.get(caregiver, 0)
        new = old + delta
        self._week[caregiver] = new
        self._paid += delta
        self._overtime += max(0, new - agreed) - max(0, old - agreed)

    def copy(self) -> "Solution":
        other = Solution.__new__(Solution)
        other.instance, other.weights = self.instance, self.weights
        other._routes, other._metrics, other._week = dict(self._routes), dict(self._metrics), dict(self._week)
        other._paid, other._pen, other._aff, other._overtime = self._paid, self._pen, self._aff, self._overtime
        return other

    # -- access ---------------------------------------------------------
    def route(self, key: Key) -> Route | None:
        return self._routes.get(key)

    def metrics(self, key: Key) -> RouteMetrics | None:
        return self._metrics.get(key)

    def routes(self) -> Iterator[Route]:
        return iter(sorted(self._routes.values(), key=lambda r: r.key))

    def keys(self) -> list[Key]:
        return sorted(self._routes)

    def weekly_paid(self, caregiver: int) -> int:
        return self._week.get(caregiver, 0)

    def overtime(self, caregiver: int) -> int:
        return max(0, self.weekly_paid(caregiver) - self.instance.caregiver(caregiver).weekly_agreed)

    def assignment(self) -> dict[int, Key]:
        return {j: r.key for r in self._routes.values() for j in r.services}

    def start_of(self, j: int) -> int | None:
        for r in self._routes.values():
            if j in r.services:
                return r.starts[r.services.index(j)]
        return None

    @property
    def n_assigned(self) -> int:
        return sum(len(r) for r in self._routes.values())

    @property
    def total_paid(self) -> int:
        return self._paid

    @property
    def total_overtime(self) -> int:
        return self._overtime

    @property
    def total_penalization(self) -> int:
        return self._pen

    @property
    def total_affinity(self) -> int:
        return self._aff

    @property
    def objectives(self) -> tuple[int, int]:
        w = self.weights
        return (w.w1 * self._overtime + w.w2 * self._paid, w.w3 * self._aff + w.w4 * self._pen)

    def objectives_with(self, key: Key, metrics: RouteMetrics | None) -> tuple[int, int]:
        """Objectives if route ``key`` had ``metrics`` (None: empty), without mutating."""
        old = self._metrics.get(key)
        d_paid = (metrics.paid if metrics else 0) - (old.paid if old else 0)
        d_pen = (metrics.penalization if metrics else 0) - (old.penalization if old else 0)
        d_aff = (metrics.affinity if metrics else 0) - (old.affinity if old else 0)
        agreed = self.instance.caregiver(key[0]).weekly_agreed
        w_old = self._week.get(key[0], 0)
        w_new = w_old + d_paid
        overtime = self._overtime + max(0, w_new - agreed) - max(0, w_old - agreed)
        w = self.weights
        return (w.w1 * overtime + w.w2 * (self._paid + d_paid),
                w.w3 * (self._aff + d_aff) + w.w4 * (self._pen + d_pen))

    def route_signature(self) -> frozenset:
        """Hashable description of the routes without start times."""
        return frozenset((k, r.services) for k, r in self._routes.items())

    # -- export ---------------------------------------------------------
    def to_dict(self) -> dict:
        f1, f2 = self.objectives
        routes = []
        for r in self.routes():
            m = self._metrics[r.key]
            routes.append({
                "caregiver": r.caregiver, "day": r.day,
                "services": list(r.services), "starts": list(r.starts),
                "paid_time": m.paid, "penalization": m.penalization, "affinity": m.affinity,
                "unpaid_break": m.breaks.deducted,
                "paid_idle": m.paid - sum(self.instance.service(j).duration for j in r.services)
                - sum(self.instance.theta(a, b) for a, b in zip(r.services, r.services[1:])),
            })
        return {
            "f1": f1, "f2": f2,
            "overtime": {str(i): self.overtime(i) for i in sorted(self._week)},
            "routes": routes,
        }

    @classmethod
    def from_dict(cls, instance: Instance, data: Mapping) -> "Solution":
        return cls(instance, [Route(r["caregiver"], r["day"], tuple(r["services"]), tuple(r["starts"]))
                              for r in data["routes"]])

    def __repr__(self) -> str:
        return f"Solution(objectives={self.objectives}, routes={len(self._routes)})"


def evaluate(solution: Solution, weights: ObjectiveWeights | None = None) -> tuple[int, int]:
    """Objective pair (f1, f2) of a complete solution, recomputed from scratch."""
    inst = solution.instance
    seen: dict[int, int] = {}
    for r in solution.routes():
        for j in r.services:
            seen[j] = seen.get(j, 0) + 1
    dup = sorted(j for j, c in seen.items() if c > 1)
    missing = sorted(set(range(1, inst.n_services + 1)) - set(seen))
    if dup or missing:
        raise SolutionError(f"services not covered exactly once: missing={missing} duplicated={dup}")
    w = weights or solution.weights
    week: dict[int, int] = {}
    paid = pen = aff = 0
    for r in solution.routes():
        m = compute_day_metrics(r, inst)
        week[r.caregiver] = week.get(r.caregiver, 0) + m.paid
        paid += m.paid
        pen += m.penalization
        aff += m.affinity
    overtime = sum(max(0, v - inst.caregiver(i).weekly_agreed) for i, v in week.items())
    return (w.w1 * overtime + w.w2 * paid, w.w3 * aff + w.w4 * pen)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str


def check_route(route: Route, inst: Instance) -> list[Violation]:
    out: list[Violation] = []
    i, d = route.key
    if not 1 <= i <= inst.n_caregivers:
        return [Violation("unknown_caregiver", f"route ({i}, {d}): no caregiver {i}")]
    cg = inst.caregiver(i)
    for j, t in zip(route.services, route.starts):
        if not 1 <= j <= inst.n_services:
            out.append(Violation("unknown_service", f"route ({i}, {d}): no service {j}"))
            continue
        s = inst.service(j)
        if s.day != d:
            out.append(Violation("wrong_day", f"service {j} belongs to day {s.day}, routed on day {d}"))
        if not cg.can_serve(j):
            out.append(Violation("compatibility", f"caregiver {i} cannot perform service {j}"))
        lo, hi = s.hard_on(d)
        if t < lo or t + s.duration > hi:
            out.append(Violation("hard_window", f"service {j} occupies [{t}, {t + s.duration}] outside hard window [{lo}, {hi}]"))
    if out and any(v.kind == "unknown_service" for v in out):
        return out
    for (a, ta), (b, tb) in zip(zip(route.services, route.starts), zip(route.services[1:], route.starts[1:])):
        need = ta + inst.service(a).duration + inst.theta(a, b)
        if tb < need:
            out.append(Violation("travel_order", f"service {b} starts at {tb} before {need} (end of {a} plus travel)"))
    if route.services:
        if d not in cg.availability:
            out.append(Violation("availability", f"caregiver {i} is not available on day {d}"))
        else:
            g_lo, g_hi = cg.availability[d]
            t0, ts = route.starts[0], route.day_end(inst)
            if t0 < g_lo or ts > g_hi:
                out.append(Violation("availability", f"caregiver {i} day {d} works [{t0}, {ts}] outside [{g_lo}, {g_hi}]"))
            m = compute_day_metrics(route, inst)
            cap = cg.daily_max.get(d, 0)
            if m.paid > cap:
                out.append(Violation("daily_max", f"caregiver {i} day {d} paid time {m.paid} exceeds daily max {cap}"))
    return out


def check_feasibility(solution: Solution, instance: Instance | None = None) -> list[Violation]:
    """All constraint violations of ``solution``; empty iff feasible.

    Overtime is derived from the schedule, so its lower bound holds by
    construction and is not reported separately.
    """
    inst = instance or solution.instance
    out: list[Violation] = []
    count: dict[int, int] = {}
    for r in solution.routes():
        for j in r.services:
            count[j] = count.get(j, 0) + 1
        out.extend(check_route(r, inst))
    for j in range(1, inst.n_services + 1):
        c = count.get(j, 0)
        if c == 0:
            out.append(Violation("unassigned", f"service {j} is not assigned"))
        elif c > 1:
            out.append(Violation("duplicate", f"service {j} is assigned {c} times"))
    return out
