"""Start times for a fixed caregiver-day route.

Two lexicographic optimizers over the start times of a fixed service order:

* welfare-first: minimum soft window penalization, then minimum paid time;
* cost-first: minimum paid time, then minimum penalization.

Both are solved exactly by dynamic programming over a time grid (1 minute by
default).  Paid time is ``span - r_hat`` where ``r_hat`` is the largest idle
gap when it reaches ``pi_min``.  Writing ``span`` as a constant plus the sum
of all gaps, a schedule's paid time is the minimum over "which gap (if any)
is the unpaid break" of the constant plus the remaining gaps, subject to the
chosen gap being at least ``pi_min``.  The DP carries a flag telling whether
the break has been taken, so the min over that choice is folded in.

Among equally good schedules the lexicographically earliest start times are
returned.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .evaluation import Route, RouteMetrics, compute_day_metrics
from .instance import DAY_MINUTES, Instance

WELFARE = "welfare"
COST = "cost"
MODES = (WELFARE, COST)

_INF = np.inf
_WELFARE_SCALE = 4096.0  # exceeds any paid time within one day


@dataclass(frozen=True)
class ScheduleBounds:
    earliest: tuple[int, ...]
    latest: tuple[int, ...]


class _RouteData:
    """Per-position arrays of a route order on one caregiver-day."""

    __slots__ = ("eta", "theta", "lo", "hi", "soft_lo", "soft_hi", "cap", "const")

    def __init__(self, inst: Instance, order: Sequence[int], caregiver: int | None, day: int):
        svc = [inst.service(j) for j in order]
        g_lo, g_hi = 0, DAY_MINUTES
        self.cap = None
        if caregiver is not None:
            cg = inst.caregiver(caregiver)
            g_lo, g_hi = cg.availability.get(day, (0, 0))
            self.cap = cg.daily_max.get(day, 0)
        self.eta = [s.duration for s in svc]
        self.theta = [inst.theta(a, b) for a, b in zip(order, order[1:])]
        self.lo = [max(s.hard_on(day)[0], g_lo) for s in svc]
        self.hi = [min(s.hard_on(day)[1], g_hi) - s.duration for s in svc]
        self.soft_lo = [s.soft_on(day)[0] for s in svc]
        self.soft_hi = [s.soft_on(day)[1] for s in svc]
        self.const = sum(self.eta) + sum(self.theta)


def _bounds(rd: _RouteData) -> tuple[list[int], list[int]] | None:
    m = len(rd.eta)
    te = list(rd.lo)
    for k in range(1, m):
        te[k] = max(rd.lo[k], te[k - 1] + rd.eta[k - 1] + rd.theta[k - 1])
    tl = list(rd.hi)
    for k in range(m - 2, -1, -1):
        tl[k] = min(rd.hi[k], tl[k + 1] - rd.eta[k] - rd.theta[k])
    if any(e > l for e, l in zip(te, tl)):
        return None
    return te, tl


def compute_bounds(order: Sequence[int], instance: Instance, caregiver: int | None = None,
                   day: int | None = None) -> ScheduleBounds | None:
    """Earliest and latest start of every service of the order, or None if it cannot be scheduled."""
    if not order:
        return ScheduleBounds((), ())
    day = instance.service(order[0]).day if day is None else day
    b = _bounds(_RouteData(instance, order, caregiver, day))
    return None if b is None else ScheduleBounds(tuple(b[0]), tuple(b[1]))


def _suffix_min(arr: np.ndarray, axis: int = -1) -> np.ndarray:
    """Suffix minima along ``axis`` with one trailing +inf slot."""
    rev = np.flip(arr, axis=axis)
    sm = np.flip(np.minimum.accumulate(rev, axis=axis), axis=axis)
    pad = [(0, 0)] * arr.ndim
    pad[axis] = (0, 1)
    return np.pad(sm, pad, constant_values=_INF)


class RouteScheduler:
    """Exact fixed-order schedulers with a bounded result cache.

    ``step`` is the time grid in minutes; start times are restricted to its
    multiples.  With integer data, ``step=1`` is exact over all integer
    schedules.
    """

    def __init__(self, instance: Instance, step: int = 1, cache_size: int = 100_000):
        self.instance = instance
        self.step = int(step)
        self.cache_size = cache_size
        self._cache: OrderedDict = OrderedDict()
        self.calls = 0
        self.hits = 0

    # ------------------------------------------------------------------
    def bounds(self, order: Sequence[int], caregiver: int | None = None, day: int | None = None):
        return compute_bounds(order, self.instance, caregiver, day)

    def welfare_first(self, order: Sequence[int], caregiver: int | None = None, day: int | None = None) -> Route | None:
        res = self.solve(order, caregiver, day, WELFARE)
        return None if res is None else res[0]

    def cost_first(self, order: Sequence[int], caregiver: int | None = None, day: int | None = None) -> Route | None:
        res = self.solve(order, caregiver, day, COST)
        return None if res is None else res[0]

    def solve(self, order: Sequence[int], caregiver: int | None, day: int | None,
              mode: str) -> tuple[Route, RouteMetrics] | None:
        """Optimal route and its metrics, or None when no feasible schedule exists."""
        if mode not in MODES:
            raise ValueError(f"unknown scheduling mode {mode!r}")
        order = tuple(order)
        if day is None:
            day = self.instance.service(order[0]).day if order else 1
        key = (caregiver, day, order, mode)
        self.calls += 1
        hit = self._cache.get(key)
        if hit is not None or key in self._cache:
            self.hits += 1
            self._cache.move_to_end(key)
            return hit
        res = self._solve(order, caregiver, day, mode)
        self._cache[key] = res
        if len(self._cache) > self.cache_size:
            self._cache.popitem(last=False)
        return res

    # ------------------------------------------------------------------
    def _grid(self, te: list[int], tl: list[int]) -> list[np.ndarray] | None:
        s = self.step
        grids = []
        for e, l in zip(te, tl):
            lo = -(-e // s) * s
            hi = (l // s) * s
            if lo > hi:
                return None
            grids.append(np.arange(lo, hi + 1, s, dtype=np.int64))
        return grids

    def _solve(self, order, caregiver, day, mode):
        cg = caregiver if caregiver is not None else 0
        if not order:
            return Route(cg, day, (), ()), compute_day_metrics(Route(cg, day, (), ()), self.instance)
        rd = _RouteData(self.instance, order, caregiver, day)
        b = _bounds(rd)
        if b is None:
            return None
        grids = self._grid(*b)
        if grids is None:
            return None
        pens = [np.maximum(0, sl - T) + np.maximum(0, T + e - sh)
                for T, e, sl, sh in zip(grids, rd.eta, rd.soft_lo, rd.soft_hi)]
        if mode == WELFARE:
            w_pen, w_paid = _WELFARE_SCALE, 1.0
        else:
            w_pen, w_paid = 1.0, float(1 + sum(int(p.max()) for p in pens))
        starts = _lex_dp(rd, grids, pens, w_pen, w_paid, self.instance.pi_min)
        if starts is None:
            return None
        route = Route(cg, day, order, starts)
        metrics = compute_day_metrics(route, self.instance)
        if rd.cap is not None and metrics.paid > rd.cap:
            if mode == COST:
                return None  # the minimum paid time already exceeds the daily maximum
            starts = _capped_dp(rd, grids, pens, w_pen, w_paid, self.instance.pi_min, rd.cap - rd.const)
            if starts is None:
                return None
            route = Route(cg, day, order, starts)
            metrics = compute_day_metrics(route, self.instance)
        return route, metrics


def _lex_dp(rd: _RouteData, grids, pens, w_pen: float, w_paid: float, pi_min: int) -> tuple[int, ...] | None:
    """Minimize ``w_pen * pen + w_paid * paid`` over grid schedules (no daily cap)."""
    m = len(grids)
    V0 = [None] * m  # break not yet taken
    V1 = [None] * m  # break taken (or never taken: V1 acts as "no more break")
    last = w_pen * pens[-1].astype(float)
    V0[-1], V1[-1] = last, last
    for k in range(m - 2, -1, -1):
        T, Tn = grids[k], grids[k + 1]
        a = T + rd.eta[k] + rd.theta[k]
        pos = np.searchsorted(Tn, a, "left")
        pos_b = np.searchsorted(Tn, a + pi_min, "left")
        paid0 = _suffix_min(V0[k + 1] + w_paid * Tn)[pos] - w_paid * a
        paid1 = _suffix_min(V1[k + 1] + w_paid * Tn)[pos] - w_paid * a
        brk = _suffix_min(V1[k + 1])[pos_b]
        here = w_pen * pens[k]
        V0[k] = here + np.minimum(paid0, brk)
        V1[k] = here + paid1
    i = int(np.argmin(V0[0]))
    if not np.isfinite(V0[0][i]):
        return None
    starts = [int(grids[0][i])]
    flag = 0
    for k in range(m - 1):
        Tn = grids[k + 1]
        a = starts[-1] + rd.eta[k] + rd.theta[k]
        ok = Tn >= a
        opt = np.where(ok, (V1 if flag else V0)[k + 1] + w_paid * (Tn - a), _INF)
        j = int(np.argmin(opt))
        best, nflag = opt[j], flag
        if not flag:
            optb = np.where(Tn >= a + pi_min, V1[k + 1], _INF)
            jb = int(np.argmin(optb))
            if optb[jb] < best - 0.5 or (abs(optb[jb] - best) < 0.5 and jb < j):
                j, best, nflag = jb, optb[jb], 1
        starts.append(int(Tn[j]))
        flag = nflag
    return tuple(starts)


def _capped_dp(rd: _RouteData, grids, pens, w_pen: float, w_paid: float, pi_min: int,
               budget: int) -> tuple[int, ...] | None:
    """Same objective with the paid idle time limited to ``budget`` minutes.

    State is (start time, paid idle time so far); the paid idle time grows by
    each gap that is not the unpaid break.
    """
    if budget < 0:
        return None
    m = len(grids)
    R = budget
    P = np.arange(R + 1)
    F0 = [None] * m
    F1 = [None] * m
    last = np.repeat((w_pen * pens[-1].astype(float))[:, None], R + 1, axis=1)
    F0[-1], F1[-1] = last, last

    def paid_step(Fn: np.ndarray, Tn: np.ndarray, a: np.ndarray) -> np.ndarray:
        # result[t, p] = min_{t' >= a_t, p + t' - a_t <= R} Fn[t', p + t' - a_t] + w_paid (t' - a_t)
        q = np.arange(-int(a.max()), R - int(a.min()) + 1)
        Q = q[:, None] + Tn[None, :]
        valid = (Q >= 0) & (Q <= R)
        E = np.where(valid, Fn[np.arange(len(Tn))[None, :], np.clip(Q, 0, R)], _INF) + w_paid * Tn[None, :]
        E = _suffix_min(E, axis=1)
        pos = np.searchsorted(Tn, a, "left")
        qi = (P[None, :] - a[:, None]) + int(a.max())
        return E[qi, pos[:, None]] - w_paid * a[:, None]

    for k in range(m - 2, -1, -1):
        T, Tn = grids[k], grids[k + 1]
        a = T + rd.eta[k] + rd.theta[k]
        here = (w_pen * pens[k])[:, None]
        paid0 = paid_step(F0[k + 1], Tn, a)
        paid1 = paid_step(F1[k + 1], Tn, a)
        pos_b = np.searchsorted(Tn, a + pi_min, "left")
        brk = _suffix_min(F1[k + 1], axis=0)[pos_b, :]
        F0[k] = here + np.minimum(paid0, brk)
        F1[k] = here + paid1
    col = F0[0][:, 0]
    i = int(np.argmin(col))
    if not np.isfinite(col[i]):
        return None
    starts = [int(grids[0][i])]
    flag, p = 0, 0
    for k in range(m - 1):
        Tn = grids[k + 1]
        a = starts[-1] + rd.eta[k] + rd.theta[k]
        d = Tn - a
        ok = (d >= 0) & (p + d <= R)
        Fn = F1[k + 1] if flag else F0[k + 1]
        opt = np.where(ok, Fn[np.arange(len(Tn)), np.clip(p + d, 0, R)] + w_paid * d, _INF)
        j = int(np.argmin(opt))
        best, nflag, np_ = opt[j], flag, p + int(d[j])
        if not flag:
            optb = np.where(Tn >= a + pi_min, F1[k + 1][:, p], _INF)
            jb = int(np.argmin(optb))
            if optb[jb] < best - 0.5 or (abs(optb[jb] - best) < 0.5 and jb < j):
                j, best, nflag, np_ = jb, optb[jb], 1, p
        starts.append(int(Tn[j]))
        flag, p = nflag, np_
    return tuple(starts)


def schedule_welfare_first(order: Sequence[int], instance: Instance, caregiver: int | None = None,
                           day: int | None = None, step: int = 1) -> Route | None:
    return RouteScheduler(instance, step).welfare_first(order, caregiver, day)


def schedule_cost_first(order: Sequence[int], instance: Instance, caregiver: int | None = None,
                        day: int | None = None, step: int = 1) -> Route | None:
    return RouteScheduler(instance, step).cost_first(order, caregiver, day)
