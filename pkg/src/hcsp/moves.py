"""Single-service time shifts used to densify the non-dominated front.

A shift moves one service of a route in time; neighbours are pushed only
as far as the travel-time chain forces them (downstream on a delay,
upstream on an advance).  The welfare move looks for shifts that keep the
soft window penalization from growing, the cost move looks for shifts that
shrink paid idle time or open an unpaid break.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .evaluation import Route, Solution, compute_day_metrics
from .instance import Instance
from .scheduler import compute_bounds


@dataclass(frozen=True)
class MoveWindow:
    service: int
    max_delay: int
    max_advance: int
    delay_breaks: tuple[int, ...] = ()
    advance_breaks: tuple[int, ...] = ()
    delay_range: tuple[int, int] = (0, 0)
    advance_range: tuple[int, int] = (0, 0)


def _chain(route: Route, inst: Instance):
    eta = [inst.service(j).duration for j in route.services]
    theta = [inst.theta(a, b) for a, b in zip(route.services, route.services[1:])]
    return eta, theta


def shift_service(route: Route, position: int, delta: int, inst: Instance) -> Route:
    """Move the service at ``position`` by ``delta`` minutes (positive delays).

    Services after it (delay) or before it (advance) move only when the
    chain of durations and travel times forces them.
    """
    eta, theta = _chain(route, inst)
    t = list(route.starts)
    t[position] += delta
    if delta > 0:
        for k in range(position + 1, len(t)):
            t[k] = max(t[k], t[k - 1] + eta[k - 1] + theta[k - 1])
    elif delta < 0:
        for k in range(position - 1, -1, -1):
            t[k] = min(t[k], t[k + 1] - eta[k] - theta[k])
    return Route(route.caregiver, route.day, route.services, tuple(t))


def _shifted_penalties(route: Route, position: int, deltas: np.ndarray, inst: Instance, sign: int) -> np.ndarray:
    """Route penalization for each shift in ``deltas`` (vectorized over shifts)."""
    eta, theta = _chain(route, inst)
    svc = [inst.service(j) for j in route.services]
    n = len(route.starts)
    starts = [np.full(deltas.shape, s, dtype=np.int64) for s in route.starts]
    starts[position] = route.starts[position] + sign * deltas
    if sign > 0:
        for k in range(position + 1, n):
            starts[k] = np.maximum(starts[k], starts[k - 1] + eta[k - 1] + theta[k - 1])
    else:
        for k in range(position - 1, -1, -1):
            starts[k] = np.minimum(starts[k], starts[k + 1] - eta[k] - theta[k])
    total = np.zeros(deltas.shape, dtype=np.int64)
    for s, t in zip(svc, starts):
        total += np.maximum(0, s.soft_window[0] - t) + np.maximum(0, t + s.duration - s.soft_window[1])
    return total


def _breakpoints(pen: np.ndarray, deltas: np.ndarray) -> tuple[int, ...]:
    """Shifts where the penalization slope changes, plus the largest shift."""
    if len(deltas) == 0:
        return ()
    out = []
    if len(deltas) >= 3:
        slope = np.diff(pen)
        change = np.nonzero(slope[1:] != slope[:-1])[0] + 1
        out = [int(deltas[i]) for i in change]
    out.append(int(deltas[-1]))
    return tuple(sorted(set(d for d in out if d > 0)))


def welfare_window(route: Route, position: int, inst: Instance, step: int = 1) -> MoveWindow | None:
    """Shift limits of the welfare move for one service, or None if the route cannot be scheduled."""
    b = compute_bounds(route.services, inst, route.caregiver, route.day)
    if b is None:
        return None
    j = route.services[position]
    s = inst.service(j)
    t = route.starts[position]
    lo, hi = s.soft_window
    max_delay = max(0, min(hi - s.duration - t, b.latest[position] - t)) if t + s.duration <= hi else 0
    max_advance = max(0, min(t - lo, t - b.earliest[position]))
    max_delay -= max_delay % step
    max_advance -= max_advance % step

    d_grid = np.arange(0, max_delay + 1, step, dtype=np.int64)
    a_grid = np.arange(0, max_advance + 1, step, dtype=np.int64)
    d_pen = _shifted_penalties(route, position, d_grid, inst, +1)
    a_pen = _shifted_penalties(route, position, a_grid, inst, -1)
    delay_breaks = _breakpoints(d_pen, d_grid)
    advance_breaks = _breakpoints(a_pen, a_grid)

    # largest delay over which the penalization never goes up
    rises = np.nonzero(np.diff(d_pen) > 0)[0]
    cap = int(d_grid[rises[0]]) if len(rises) else max_delay
    return MoveWindow(j, max_delay, max_advance, delay_breaks, advance_breaks,
                      delay_range=(0, cap), advance_range=(0, max_advance))


def cost_windows(route: Route, position: int, inst: Instance, step: int = 1) -> dict[str, tuple[int, int]]:
    """Shift ranges of the four cost-move options for one service.

    ``delay_shrink``: delay absorbing the idle time after the service;
    ``delay_break``: delay turning the preceding gap into an unpaid break;
    ``advance_shrink``: advance absorbing the idle time before the service;
    ``advance_break``: advance turning the following gap into an unpaid break.
    Options whose range is empty are omitted.
    """
    b = compute_bounds(route.services, inst, route.caregiver, route.day)
    if b is None:
        return {}
    eta, theta = _chain(route, inst)
    t = route.starts
    gaps = [t[k + 1] - t[k] - eta[k] - theta[k] for k in range(len(t) - 1)]
    max_delay = b.latest[position] - t[position]
    max_advance = t[position] - b.earliest[position]
    pi = inst.pi_min
    out = {
        "delay_shrink": (0, min(max_delay, sum(gaps[position:]))),
        "advance_shrink": (0, min(max_advance, sum(gaps[:position]))),
    }
    if position > 0:
        out["delay_break"] = (max(0, pi - gaps[position - 1]), max_delay)
    if position < len(t) - 1:
        out["advance_break"] = (max(0, pi - gaps[position]), max_advance)
    result = {}
    for name in ("delay_shrink", "delay_break", "advance_shrink", "advance_break"):
        if name not in out:
            continue
        lo, hi = out[name]
        lo = -(-lo // step) * step
        hi -= hi % step
        if hi >= max(lo, step):
            result[name] = (max(lo, 0), hi)
    return result


def _draw(rng: random.Random, lo: int, hi: int, step: int) -> int:
    lo = max(lo, step)
    if hi < lo:
        return 0
    return lo + step * rng.randint(0, (hi - lo) // step)


def _pick(solution: Solution, rng: random.Random):
    keys = solution.keys()
    if not keys:
        return None
    route = solution.route(keys[rng.randrange(len(keys))])
    return route, rng.randrange(len(route.services))


def _candidate(solution: Solution, route: Route) -> Solution | None:
    inst = solution.instance
    m = compute_day_metrics(route, inst)
    if m.paid > inst.caregiver(route.caregiver).daily_max.get(route.day, 0):
        return None
    out = solution.copy()
    out.set_route(route, m)
    return out


def improve_welfare_move(solution: Solution, rng: random.Random | int, step: int = 1) -> list[Solution]:
    """Up to two candidates: one delayed and one advanced copy of a random service."""
    rng = rng if isinstance(rng, random.Random) else random.Random(rng)
    picked = _pick(solution, rng)
    if picked is None:
        return []
    route, pos = picked
    w = welfare_window(route, pos, solution.instance, step)
    if w is None:
        return []
    out = []
    for sign, (lo, hi) in ((+1, w.delay_range), (-1, w.advance_range)):
        delta = _draw(rng, lo, hi, step)
        if delta:
            cand = _candidate(solution, shift_service(route, pos, sign * delta, solution.instance))
            if cand is not None:
                out.append(cand)
    return out


def improve_cost_move(solution: Solution, rng: random.Random | int, step: int = 1) -> list[Solution]:
    """Up to four candidates, one per applicable cost-move option."""
    rng = rng if isinstance(rng, random.Random) else random.Random(rng)
    picked = _pick(solution, rng)
    if picked is None:
        return []
    route, pos = picked
    out = []
    for name, (lo, hi) in cost_windows(route, pos, solution.instance, step).items():
        delta = _draw(rng, lo, hi, step)
        if not delta:
            continue
        sign = 1 if name.startswith("delay") else -1
        cand = _candidate(solution, shift_service(route, pos, sign * delta, solution.instance))
        if cand is not None:
            out.append(cand)
    return out
