"""Biobjective driver: two lexicographic ALNS directions plus schedule-shift moves.

Step 1 builds one solution per direction and improves it with ALNS.
Step 2 repeatedly restarts short ALNS runs (both directions) from random
known solutions to collect route-distinct solutions.  Step 3 applies the
welfare and cost shift moves to random known solutions.  Every produced
solution is offered to the non-dominated archive.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass, field, replace
from typing import IO, Callable

from .alns import CW, WC, ALNSConfig, Proportion, RouteSet, Search, alns_run
from .archive import ParetoArchive
from .instance import Instance
from .moves import improve_cost_move, improve_welfare_move


@dataclass
class BialnsConfig:
    n: int = 1000
    p: Proportion = field(default_factory=lambda: Proportion(1.0, True))
    nroutes: int = 6000
    nalns: int = 5
    pr: Proportion = field(default_factory=lambda: Proportion(0.05, True))
    nsols: int = 200_000
    seed: int = 0
    step: int = 1
    cooling: float = 0.99
    step1_time_limit: float | None = None
    step2_time_limit: float | None = None
    step3_time_limit: float | None = None

    def __post_init__(self):
        self.p = Proportion.parse(self.p)
        self.pr = Proportion.parse(self.pr)
        for name in ("n", "nroutes", "nalns", "nsols"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.step < 1:
            raise ValueError("step must be >= 1")

    def snapshot(self) -> dict:
        d = asdict(self)
        d["p"], d["pr"] = str(self.p), str(self.pr)
        return d


PRESETS: dict[str, dict] = {
    "solomon-10": dict(n=1000, p="auto_100%", nroutes=6000, nalns=5, pr="auto_5%", nsols=200_000),
    "solomon-15": dict(n=1000, p="auto_100%", nroutes=8000, nalns=10, pr="auto_10%", nsols=300_000),
    "real-week": dict(n=1000, p="auto_1%", nroutes=10_000, nalns=1, pr="1%", nsols=300_000,
                      step1_time_limit=90 * 60.0),
}


def preset(name: str, **overrides) -> BialnsConfig:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return BialnsConfig(**{**PRESETS[name], **overrides})


@dataclass
class BialnsResult:
    archive: ParetoArchive
    routes: RouteSet
    log: list[dict]


def bialns(instance: Instance, config: BialnsConfig, log_stream: IO[str] | None = None,
           clock: Callable[[], float] = time.monotonic) -> BialnsResult:
    rng = random.Random(config.seed)
    search = Search(instance, step=config.step)
    archive = ParetoArchive()
    routes = RouteSet()
    log: list[dict] = []

    def emit(step: str, started: float, **extra):
        rec = {"step": step, "archive": len(archive), "routes": len(routes),
               "seconds": round(clock() - started, 3), **extra}
        log.append(rec)
        if log_stream is not None:
            log_stream.write(json.dumps(rec, sort_keys=True) + "\n")

    # step 1: one improved solution per direction
    t0 = clock()
    long_run = ALNSConfig(iterations=config.n, proportion=config.p, cooling=config.cooling,
                          time_limit=config.step1_time_limit)
    start_wc = search.initial_solution(WC, rng)
    start_cw = search.initial_solution(CW, rng)
    best_wc = alns_run(search, WC, start_wc, routes, long_run, rng, clock).best
    best_cw = alns_run(search, CW, start_cw, routes, long_run, rng, clock).best
    archive.update(best_wc, tag="step1-wc")
    archive.update(best_cw, tag="step1-cw")
    emit("initialize", t0, initial=[list(start_wc.objectives), list(start_cw.objectives)])

    # step 2: route diversification
    t0 = clock()
    short_run = replace(long_run, iterations=config.nalns, proportion=config.pr, time_limit=None)
    done = 0
    for done in range(config.nroutes):
        if config.step2_time_limit is not None and clock() - t0 >= config.step2_time_limit:
            break
        base = _choose(rng, routes, archive)
        for direction in (WC, CW):
            res = alns_run(search, direction, base, routes, short_run, rng, clock)
            archive.update(res.best, tag=f"step2-{direction}")
    else:
        done = config.nroutes
    emit("diversify", t0, iterations=done)

    # step 3: schedule shifts
    t0 = clock()
    for done in range(config.nsols):
        if config.step3_time_limit is not None and clock() - t0 >= config.step3_time_limit:
            break
        base = _choose(rng, routes, archive)
        for cand in improve_welfare_move(base, rng, config.step):
            archive.update(cand, tag="step3-welfare")
        for cand in improve_cost_move(base, rng, config.step):
            archive.update(cand, tag="step3-cost")
    else:
        done = config.nsols
    emit("densify", t0, iterations=done, front=[list(p) for p in archive.front()])
    return BialnsResult(archive, routes, log)


def _choose(rng: random.Random, routes: RouteSet, archive: ParetoArchive):
    """Uniform draw from the union of route-distinct and non-dominated solutions."""
    k = rng.randrange(len(routes) + len(archive))
    if k < len(routes):
        return routes.items[k]
    return archive.payloads()[k - len(routes)]
