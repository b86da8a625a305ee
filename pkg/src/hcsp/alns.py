"""Adaptive large neighborhood search under a lexicographic objective.

Two directions are supported: ``wc`` (welfare first, then cost) and ``cw``
(cost first, then welfare).  Each direction schedules routes with the
matching fixed-order scheduler.
"""

from __future__ import annotations

import math
import random
import re
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .evaluation import Key, Route, RouteMetrics, Solution
from .instance import Instance
from .scheduler import COST, WELFARE, RouteScheduler

WC = "wc"
CW = "cw"
DIRECTIONS = (WC, CW)

REMOVALS = ("random", "related", "cost", "one_route", "two_route")
INSERTIONS = ("basic_greedy", "random_greedy", "other_caregiver_basic_greedy", "other_caregiver_random_greedy")


class InfeasibleInstance(ValueError):
    pass


def lex_key(objectives: tuple[int, int], direction: str) -> tuple[int, int]:
    f1, f2 = objectives
    if direction == WC:
        return (f2, f1)
    if direction == CW:
        return (f1, f2)
    raise ValueError(f"unknown direction {direction!r}")


def scheduling_mode(direction: str) -> str:
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown direction {direction!r}")
    return WELFARE if direction == WC else COST


@dataclass(frozen=True)
class Proportion:
    """Share of the services removed per destroy step.

    ``auto`` draws the count uniformly from 1..round(fraction * |S|) at every
    iteration; otherwise ``ceil(fraction * |S|)`` services are removed.
    """

    fraction: float
    auto: bool = False

    @classmethod
    def parse(cls, text: "str | float | Proportion") -> "Proportion":
        if isinstance(text, Proportion):
            return text
        if isinstance(text, (int, float)):
            return cls(float(text))
        m = re.fullmatch(r"\s*(auto_)?([0-9.]+)\s*(%?)\s*", str(text))
        if not m:
            raise ValueError(f"bad proportion {text!r}; use e.g. 0.05, 5% or auto_5%")
        value = float(m.group(2)) / (100.0 if m.group(3) else 1.0)
        if not 0 < value <= 1:
            raise ValueError(f"proportion {text!r} outside (0, 1]")
        return cls(value, bool(m.group(1)))

    def draw(self, rng: random.Random, n: int) -> int:
        if n <= 0:
            return 0
        if self.auto:
            return rng.randint(1, max(1, round(self.fraction * n)))
        return min(n, max(1, math.ceil(self.fraction * n - 1e-9)))

    def __str__(self) -> str:
        return f"{'auto_' if self.auto else ''}{self.fraction * 100:g}%"


@dataclass
class ALNSConfig:
    iterations: int = 1000
    proportion: Proportion = field(default_factory=lambda: Proportion(1.0, True))
    cooling: float = 0.99
    initial_temperature: float | None = None
    reward_best: float = 0.2
    reward_better: float = 0.1
    renormalize_every: int = 100
    time_limit: float | None = None


class Search:
    """Shared machinery: insertion evaluation, destroy and repair operators."""

    def __init__(self, instance: Instance, scheduler: RouteScheduler | None = None, step: int = 1):
        self.instance = instance
        self.scheduler = scheduler or RouteScheduler(instance, step)
        self.step = self.scheduler.step
        # caregiver-day slots able to host each service
        self.slots: dict[int, list[Key]] = {}
        for s in instance.services:
            self.slots[s.id] = [(c.id, s.day) for c in instance.caregivers
                                if c.can_serve(s.id) and c.works(s.day)]
        self._related = self._relatedness()

    def _relatedness(self) -> np.ndarray:
        inst = self.instance
        n = inst.n_services
        theta = np.array(inst.travel, dtype=float).reshape(n, n)
        theta = np.minimum(theta, theta.T)
        mid = np.array([(s.hard_window[0] + s.hard_window[1]) / 2 for s in inst.services])
        dmid = np.abs(mid[:, None] - mid[None, :])
        day = np.array([s.day for s in inst.services])
        rel = theta / max(1.0, theta.max()) + dmid / max(1.0, dmid.max()) + (day[:, None] != day[None, :])
        return rel

    # -- scheduling -----------------------------------------------------
    def schedule(self, order, key: Key, direction: str) -> tuple[Route, RouteMetrics] | None:
        return self.scheduler.solve(order, key[0], key[1], scheduling_mode(direction))

    def reschedule_all(self, sol: Solution, direction: str) -> list[int]:
        """Reschedule every route in place; returns services dropped from unschedulable routes."""
        dropped = []
        for key in sol.keys():
            r = sol.route(key)
            res = self.schedule(r.services, key, direction)
            if res is None:
                sol.remove_route(key)
                dropped.extend(r.services)
            else:
                sol.set_route(*res)
        return dropped

    # -- insertion ------------------------------------------------------
    def best_in_route(self, sol: Solution, j: int, key: Key, direction: str):
        """Best position of ``j`` in route ``key`` as (lex key, route, metrics), or None."""
        r = sol.route(key)
        order = r.services if r else ()
        best = None
        for pos in range(len(order) + 1):
            res = self.schedule(order[:pos] + (j,) + order[pos:], key, direction)
            if res is None:
                continue
            k = lex_key(sol.objectives_with(key, res[1]), direction)
            if best is None or k < best[0]:
                best = (k, res[0], res[1])
        return best

    def best_insertion(self, sol: Solution, j: int, direction: str, avoid: int | None = None,
                       cache: dict | None = None):
        """Cheapest (lex) insertion of ``j`` over all slots.

        With ``avoid`` set, that caregiver is used only when no other slot fits.
        Returns (lex key, route, metrics) or None.
        """
        best = best_avoided = None
        for key in self.slots[j]:
            if cache is not None and (j, key) in cache:
                hit = cache[(j, key)]
            else:
                hit = self.best_in_route(sol, j, key, direction)
                if cache is not None:
                    cache[(j, key)] = hit
            if hit is None:
                continue
            # route-local best stays optimal when other routes change; refresh its global value
            k = lex_key(sol.objectives_with(key, hit[2]), direction)
            cand = (k, key, hit[1], hit[2])
            if avoid is not None and key[0] == avoid:
                if best_avoided is None or cand[:2] < best_avoided[:2]:
                    best_avoided = cand
            elif best is None or cand[:2] < best[:2]:
                best = cand
        pick = best or best_avoided
        return None if pick is None else (pick[0], pick[2], pick[3])

    def repair(self, sol: Solution, removed: Iterable[int], operator: str, direction: str,
               rng: random.Random, previous: dict[int, int] | None = None) -> Solution | None:
        """Reinsert ``removed`` into ``sol`` (in place); None if some service fits nowhere."""
        if operator not in INSERTIONS:
            raise ValueError(f"unknown insertion operator {operator!r}")
        previous = previous or {}
        other = operator.startswith("other_caregiver")
        remaining = list(removed)
        cache: dict = {}

        def place(j, hit):
            _, route, metrics = hit
            sol.set_route(route, metrics)
            for key in [k for k in cache if k[1] == route.key]:
                del cache[key]

        if operator.endswith("random_greedy"):
            rng.shuffle(remaining)
            for j in remaining:
                hit = self.best_insertion(sol, j, direction, previous.get(j) if other else None, cache)
                if hit is None:
                    return None
                place(j, hit)
            return sol
        while remaining:
            chosen = None
            for j in remaining:
                hit = self.best_insertion(sol, j, direction, previous.get(j) if other else None, cache)
                if hit is None:
                    return None
                if chosen is None or (hit[0], j) < (chosen[1][0], chosen[0]):
                    chosen = (j, hit)
            remaining.remove(chosen[0])
            place(*chosen)
        return sol

    # -- removal --------------------------------------------------------
    def _drop(self, sol: Solution, services: Iterable[int]) -> None:
        drop = set(services)
        for key in sol.keys():
            r = sol.route(key)
            if drop.intersection(r.services):
                keep = [(j, t) for j, t in zip(r.services, r.starts) if j not in drop]
                if keep:
                    sol.set_route(Route(r.caregiver, r.day, tuple(j for j, _ in keep), tuple(t for _, t in keep)))
                else:
                    sol.remove_route(key)

    def destroy(self, sol: Solution, operator: str, q: int, direction: str,
                rng: random.Random) -> tuple[Solution, list[int]]:
        """Copy of ``sol`` with about ``q`` services removed and routes rescheduled."""
        if operator not in REMOVALS:
            raise ValueError(f"unknown removal operator {operator!r}")
        part = sol.copy()
        assigned = sorted(part.assignment())
        q = max(0, min(q, len(assigned)))
        removed: list[int] = []
        if operator == "random":
            removed = rng.sample(assigned, q)
        elif operator == "related":
            if q:
                removed = [rng.choice(assigned)]
                pool = set(assigned) - set(removed)
                while len(removed) < q:
                    ref = rng.choice(removed) - 1
                    nxt = min(pool, key=lambda k: (self._related[ref, k - 1], k))
                    removed.append(nxt)
                    pool.discard(nxt)
        elif operator == "cost":
            for _ in range(q):
                best = None
                for key in part.keys():
                    r = part.route(key)
                    for pos, j in enumerate(r.services):
                        order = r.services[:pos] + r.services[pos + 1:]
                        res = self.schedule(order, key, direction) if order else None
                        if order and res is None:
                            continue
                        k = lex_key(part.objectives_with(key, res[1] if res else None), direction)
                        if best is None or (k, j) < (best[0], best[1]):
                            best = (k, j, key, res)
                if best is None:
                    break
                _, j, key, res = best
                if res is None:
                    part.remove_route(key)
                else:
                    part.set_route(*res)
                removed.append(j)
        else:
            keys = part.keys()
            rng.shuffle(keys)
            if operator == "two_route":
                for key in keys[:2]:
                    removed.extend(part.route(key).services)
            else:
                for key in keys:
                    if len(removed) >= q:
                        break
                    services = list(part.route(key).services)
                    need = q - len(removed)
                    if len(services) > need:
                        services = rng.sample(services, need)
                    removed.extend(services)
        self._drop(part, removed)
        removed.extend(self.reschedule_all(part, direction))
        return part, removed

    # -- construction ---------------------------------------------------
    def check_placeable(self) -> None:
        """Raise InfeasibleInstance naming the first service that fits on no caregiver-day alone."""
        for s in self.instance.services:
            if not any(self.schedule((s.id,), key, WC) is not None for key in self.slots[s.id]):
                reason = "no compatible caregiver works that day" if not self.slots[s.id] else \
                    "no compatible caregiver-day can fit it within windows and daily limits"
                raise InfeasibleInstance(f"service {s.id} cannot be scheduled: {reason}")

    def initial_solution(self, direction: str, rng: random.Random, attempts: int = 50) -> Solution:
        """Random greedy insertion of every service starting from empty routes."""
        self.check_placeable()
        services = [s.id for s in self.instance.services]
        for _ in range(attempts):
            sol = Solution(self.instance)
            if self.repair(sol, services, "random_greedy", direction, rng) is not None:
                return sol
        raise InfeasibleInstance(f"no complete schedule found after {attempts} random greedy constructions")


class RouteSet:
    """Solutions with pairwise distinct routes (start times ignored), in insertion order."""

    def __init__(self):
        self._index: dict[frozenset, int] = {}
        self.items: list[Solution] = []

    def add(self, sol: Solution) -> bool:
        sig = sol.route_signature()
        if sig in self._index:
            return False
        self._index[sig] = len(self.items)
        self.items.append(sol)
        return True

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __contains__(self, sol: Solution) -> bool:
        return sol.route_signature() in self._index


@dataclass
class ALNSResult:
    best: Solution
    iterations: int
    accepted: int
    discarded: int
    weights_removal: dict[str, float]
    weights_insertion: dict[str, float]


def _roulette(rng: random.Random, weights: dict[str, float]) -> str:
    names = list(weights)
    return rng.choices(names, weights=[weights[n] for n in names])[0]


def initial_temperature(start_primary: float) -> float:
    """Temperature at which a 5% worsening of the starting primary objective is accepted half the time."""
    return max(1.0, 0.05 * abs(start_primary) / math.log(2))


def alns_run(search: Search, direction: str, start: Solution, routes: "RouteSet | None", config: ALNSConfig,
             rng: random.Random, clock: Callable[[], float] | None = None) -> ALNSResult:
    """Run ALNS from ``start``; every repaired solution with new routes is added to ``routes``."""
    clock = clock or time.monotonic
    t_start = clock()
    n = search.instance.n_services
    w_rem = {op: 1.0 for op in REMOVALS}
    w_ins = {op: 1.0 for op in INSERTIONS}
    current = best = start
    T0 = config.initial_temperature or initial_temperature(lex_key(start.objectives, direction)[0])
    sec_lo = sec_hi = lex_key(start.objectives, direction)[1]
    accepted = discarded = 0
    it = 0
    for it in range(config.iterations):
        if config.time_limit is not None and clock() - t_start >= config.time_limit:
            break
        rem = _roulette(rng, w_rem)
        ins = _roulette(rng, w_ins)
        q = config.proportion.draw(rng, n)
        previous = {j: key[0] for j, key in current.assignment().items()}
        part, removed = search.destroy(current, rem, q, direction, rng)
        new = None
        for op in [ins] + [o for o in INSERTIONS if o != ins]:
            attempt = search.repair(part.copy(), removed, op, direction, rng, previous)
            if attempt is not None:
                new, ins = attempt, op
                break
        if new is None:
            discarded += 1
            continue
        if routes is not None:
            routes.add(new)
        k_new = lex_key(new.objectives, direction)
        k_best = lex_key(best.objectives, direction)
        k_cur = lex_key(current.objectives, direction)
        sec_lo, sec_hi = min(sec_lo, k_new[1]), max(sec_hi, k_new[1])
        if k_new < k_best:
            w_rem[rem] *= 1 + config.reward_best
            w_ins[ins] *= 1 + config.reward_best
        elif k_new < k_cur:
            w_rem[rem] *= 1 + config.reward_better
            w_ins[ins] *= 1 + config.reward_better
        # acceptance measured against the best solution so far
        if k_new <= k_best:
            take = True
        else:
            if k_new[0] != k_best[0]:
                delta = k_new[0] - k_best[0]
            else:
                delta = (k_new[1] - k_best[1]) / max(1, sec_hi - sec_lo)
            temp = T0 * config.cooling ** it
            take = temp > 0 and rng.random() < math.exp(-delta / temp)
        if take:
            current = new
            accepted += 1
        if k_new < k_best:
            best = new
        if config.renormalize_every and (it + 1) % config.renormalize_every == 0:
            for w in (w_rem, w_ins):
                mean = sum(w.values()) / len(w)
                for op in w:
                    w[op] /= mean
    else:
        it = config.iterations
    return ALNSResult(best, it, accepted, discarded, w_rem, w_ins)
