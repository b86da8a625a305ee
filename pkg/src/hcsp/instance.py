"""Problem data for the home care scheduling problem and its JSON file format.

All times are integer minutes measured from the start of the day; days are
numbered 1..7.  Services belong to exactly one day.  The two dummy services
that open and close each caregiver-day are never stored.
"""

from __future__ import annotations

import json
import math
import random
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

DAYS = tuple(range(1, 8))
DAY_MINUTES = 1440
DEFAULT_PI_MIN = 120
FORMAT_VERSION = 1


class InstanceError(ValueError):
    """Raised when instance data violates the model invariants.

    ``violations`` lists one ``"<field path>: <reason>"`` string per problem.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        head = "; ".join(self.violations[:5])
        more = f" (+{len(self.violations) - 5} more)" if len(self.violations) > 5 else ""
        super().__init__(f"invalid instance: {head}{more}")


@dataclass(frozen=True)
class Service:
    id: int
    duration: int
    day: int
    hard_window: tuple[int, int]
    soft_window: tuple[int, int]
    user_id: int = 0

    def hard_on(self, day: int) -> tuple[int, int]:
        # Degenerate window on foreign days, so the service cannot be placed there.
        return self.hard_window if day == self.day else (0, 0)

    def soft_on(self, day: int) -> tuple[int, int]:
        return self.soft_window if day == self.day else (0, 0)

    @property
    def latest_start(self) -> int:
        return self.hard_window[1] - self.duration

    def penalization(self, start: int) -> int:
        lo, hi = self.soft_window
        return max(0, lo - start) + max(0, start + self.duration - hi)


@dataclass(frozen=True)
class Caregiver:
    id: int
    availability: Mapping[int, tuple[int, int]]
    daily_max: Mapping[int, int]
    weekly_agreed: int
    affinity: Mapping[int, int]
    """Affinity level per compatible service id; absent ids are incompatible."""

    def can_serve(self, service_id: int) -> bool:
        return service_id in self.affinity

    def affinity_for(self, service_id: int) -> int:
        return self.affinity.get(service_id, 0)

    def works(self, day: int) -> bool:
        return day in self.availability


@dataclass(frozen=True)
class Instance:
    services: tuple[Service, ...]
    caregivers: tuple[Caregiver, ...]
    travel: tuple[tuple[int, ...], ...]
    pi_min: int = DEFAULT_PI_MIN
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        errors = validate(self)
        if errors:
            raise InstanceError(errors)

    @property
    def n_services(self) -> int:
        return len(self.services)

    @property
    def n_caregivers(self) -> int:
        return len(self.caregivers)

    def service(self, j: int) -> Service:
        return self.services[j - 1]

    def caregiver(self, i: int) -> Caregiver:
        return self.caregivers[i - 1]

    def theta(self, j: int, k: int) -> int:
        """Travel time from service ``j`` to service ``k`` (0 into the end dummy)."""
        if k == 0 or j == 0:
            return 0
        return self.travel[j - 1][k - 1]

    def days(self) -> tuple[int, ...]:
        return tuple(sorted({s.day for s in self.services}))

    def compatible(self, j: int) -> list[int]:
        return [c.id for c in self.caregivers if c.can_serve(j) and c.works(self.service(j).day)]


def validate(inst: Instance) -> list[str]:
    errs: list[str] = []
    n = len(inst.services)
    if not isinstance(inst.pi_min, int) or inst.pi_min <= 0:
        errs.append(f"pi_min: must be a positive integer, got {inst.pi_min!r}")
    for pos, s in enumerate(inst.services):
        p = f"services[{pos}]"
        if s.id != pos + 1:
            errs.append(f"{p}.id: expected {pos + 1}, got {s.id}")
        if s.day not in DAYS:
            errs.append(f"{p}.day: {s.day} not in 1..7")
        if s.duration < 0:
            errs.append(f"{p}.duration: negative")
        a_lo, a_hi = s.hard_window
        b_lo, b_hi = s.soft_window
        if not (0 <= a_lo <= a_hi <= DAY_MINUTES):
            errs.append(f"{p}.hard_window: {s.hard_window} not an interval inside the day")
        if b_lo < a_lo:
            errs.append(f"{p}.soft_window: start {b_lo} before hard window start {a_lo}")
        if b_hi < b_lo:
            errs.append(f"{p}.soft_window: end {b_hi} before start {b_lo}")
        if b_hi > a_hi:
            errs.append(f"{p}.soft_window: end {b_hi} after hard window end {a_hi}")
        if s.duration > a_hi - a_lo:
            errs.append(f"{p}.duration: {s.duration} exceeds hard window length {a_hi - a_lo}")
    for pos, c in enumerate(inst.caregivers):
        p = f"caregivers[{pos}]"
        if c.id != pos + 1:
            errs.append(f"{p}.id: expected {pos + 1}, got {c.id}")
        for d, (lo, hi) in c.availability.items():
            if d not in DAYS:
                errs.append(f"{p}.availability[{d}]: unknown day")
            if not (0 <= lo <= hi <= DAY_MINUTES):
                errs.append(f"{p}.availability[{d}]: {lo}..{hi} not an interval inside the day")
            cap = c.daily_max.get(d)
            if cap is None:
                errs.append(f"{p}.daily_max[{d}]: missing for available day")
            elif not (0 <= cap <= hi - lo):
                errs.append(f"{p}.daily_max[{d}]: {cap} outside 0..{hi - lo}")
        if c.weekly_agreed < 0:
            errs.append(f"{p}.weekly_agreed: negative")
        for j, lvl in c.affinity.items():
            if not 1 <= j <= n:
                errs.append(f"{p}.affinity[{j}]: unknown service")
            if not (isinstance(lvl, int) and 0 <= lvl <= 5):
                errs.append(f"{p}.affinity[{j}]: level {lvl!r} not in 0..5")
    if len(inst.travel) != n or any(len(row) != n for row in inst.travel):
        errs.append(f"travel: expected a {n}x{n} matrix")
    else:
        for j, row in enumerate(inst.travel):
            for k, v in enumerate(row):
                if v < 0:
                    errs.append(f"travel[{j}][{k}]: negative")
    return errs


# --------------------------------------------------------------------------
# serialization

def to_dict(inst: Instance) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "meta": dict(inst.meta),
        "pi_min": inst.pi_min,
        "services": [
            {
                "id": s.id,
                "user_id": s.user_id,
                "day": s.day,
                "duration": s.duration,
                "hard_window": list(s.hard_window),
                "soft_window": list(s.soft_window),
            }
            for s in inst.services
        ],
        "caregivers": [
            {
                "id": c.id,
                "availability": {str(d): list(w) for d, w in sorted(c.availability.items())},
                "daily_max": {str(d): v for d, v in sorted(c.daily_max.items())},
                "weekly_agreed": c.weekly_agreed,
                "affinity": {str(j): v for j, v in sorted(c.affinity.items())},
            }
            for c in inst.caregivers
        ],
        "travel": [list(row) for row in inst.travel],
    }


def _int(value: Any, path: str, errs: list[str]) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        errs.append(f"{path}: expected integer minutes, got {value!r}")
        return 0
    return value


def _pair(value: Any, path: str, errs: list[str]) -> tuple[int, int]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        errs.append(f"{path}: expected [start, end]")
        return (0, 0)
    return (_int(value[0], f"{path}[0]", errs), _int(value[1], f"{path}[1]", errs))


def from_dict(data: Mapping[str, Any]) -> Instance:
    errs: list[str] = []
    for key in ("pi_min", "services", "caregivers", "travel"):
        if key not in data:
            errs.append(f"{key}: missing")
    if errs:
        raise InstanceError(errs)
    services = []
    for pos, s in enumerate(data["services"]):
        p = f"services[{pos}]"
        try:
            services.append(Service(
                id=_int(s["id"], f"{p}.id", errs),
                duration=_int(s["duration"], f"{p}.duration", errs),
                day=_int(s["day"], f"{p}.day", errs),
                hard_window=_pair(s["hard_window"], f"{p}.hard_window", errs),
                soft_window=_pair(s["soft_window"], f"{p}.soft_window", errs),
                user_id=_int(s.get("user_id", 0), f"{p}.user_id", errs),
            ))
        except KeyError as exc:
            errs.append(f"{p}.{exc.args[0]}: missing")
    caregivers = []
    for pos, c in enumerate(data["caregivers"]):
        p = f"caregivers[{pos}]"
        try:
            caregivers.append(Caregiver(
                id=_int(c["id"], f"{p}.id", errs),
                availability={int(d): _pair(w, f"{p}.availability[{d}]", errs)
                              for d, w in c["availability"].items()},
                daily_max={int(d): _int(v, f"{p}.daily_max[{d}]", errs)
                           for d, v in c["daily_max"].items()},
                weekly_agreed=_int(c["weekly_agreed"], f"{p}.weekly_agreed", errs),
                affinity={int(j): v for j, v in c.get("affinity", {}).items()},
            ))
        except KeyError as exc:
            errs.append(f"{p}.{exc.args[0]}: missing")
    travel = tuple(tuple(_int(v, f"travel[{j}][{k}]", errs) for k, v in enumerate(row))
                   for j, row in enumerate(data["travel"]))
    if errs:
        raise InstanceError(errs)
    return Instance(
        services=tuple(services),
        caregivers=tuple(caregivers),
        travel=travel,
        pi_min=_int(data["pi_min"], "pi_min", errs),
        meta=dict(data.get("meta", {})),
    )


def dumps(inst: Instance) -> str:
    return json.dumps(to_dict(inst), sort_keys=True, indent=1) + "\n"


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps(inst), encoding="utf-8")


def load_instance(path: str | Path) -> Instance:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError([f"<file>: not valid JSON ({exc})"]) from exc
    if not isinstance(data, dict):
        raise InstanceError(["<file>: top level must be an object"])
    return from_dict(data)


# --------------------------------------------------------------------------
# generation

@dataclass(frozen=True)
class GeneratorProfile:
    """Knobs of the synthetic generator.

    Service locations, durations and hard windows follow the shape of the
    Solomon routing benchmarks (random points in a square, travel time
    proportional to Euclidean distance); soft windows and affinities are
    sampled on top.  Every time quantity is a multiple of ``step``.
    """

    name: str = "default"
    days: int = 2
    day_window: tuple[int, int] = (420, 1260)
    durations: tuple[int, ...] = (30, 45, 60, 90)
    window_slack: tuple[int, int] = (30, 240)
    grid_size: int = 100
    minutes_per_unit: float = 0.5
    daily_max: int = 480
    weekly_ratio: tuple[float, float] = (0.6, 1.0)
    compat_prob: float = 0.7
    max_gap: int = 150
    step: int = 1
    pi_min: int = DEFAULT_PI_MIN


PROFILES: dict[str, GeneratorProfile] = {
    "default": GeneratorProfile(),
    "solomon-10": GeneratorProfile(name="solomon-10", days=2),
    "solomon-15": GeneratorProfile(name="solomon-15", days=3),
    "tiny": GeneratorProfile(name="tiny", days=2, durations=(30, 45, 60), window_slack=(15, 120),
                             grid_size=60, step=15, max_gap=180),
}


def _floor(v: float, step: int) -> int:
    return int(math.floor(v / step)) * step


def _ceil(v: float, step: int) -> int:
    return int(math.ceil(v / step)) * step


def _uniform_step(rng: random.Random, lo: int, hi: int, step: int) -> int:
    """Uniform multiple of ``step`` in ``[lo, hi]`` (both assumed on the grid)."""
    return lo + step * rng.randint(0, max(0, (hi - lo) // step))


def generate_instance(n_services: int, n_caregivers: int, seed: int,
                      profile: str | GeneratorProfile = "default") -> Instance:
    """Seeded synthetic instance with a planted feasible schedule.

    Each service is first attached to a random caregiver-day and laid out
    on a witness timeline; hard windows are then drawn around the witness
    start times, so the resulting instance is always feasible.
    """
    prof = PROFILES[profile] if isinstance(profile, str) else profile
    if n_services < 1:
        warnings.warn(f"n_services={n_services} clamped to 1")
        n_services = 1
    if n_caregivers < 1:
        warnings.warn(f"n_caregivers={n_caregivers} clamped to 1")
        n_caregivers = 1
    step = prof.step
    rng = random.Random(f"hcsp:{seed}:{n_services}:{n_caregivers}:{prof.name}")
    days = list(range(1, min(7, max(1, prof.days)) + 1))
    day_lo, day_hi = _ceil(prof.day_window[0], step), _floor(prof.day_window[1], step)
    daily_max = min(_floor(prof.daily_max, step), day_hi - day_lo)

    locs = [(rng.uniform(0, prof.grid_size), rng.uniform(0, prof.grid_size)) for _ in range(n_services)]
    travel = tuple(
        tuple(0 if j == k else _ceil(math.dist(locs[j], locs[k]) * prof.minutes_per_unit, step)
              for k in range(n_services))
        for j in range(n_services))
    durations = [_ceil(rng.choice(prof.durations), step) for _ in range(n_services)]
    day_of = [0] * n_services
    owner = [0] * n_services

    # witness timeline: append each service to a random caregiver-day that still has room
    witness: dict[int, int] = {}
    tail: dict[tuple[int, int], tuple[int, int]] = {}  # (caregiver, day) -> (last service, end time)
    slots = [(i, d) for i in range(1, n_caregivers + 1) for d in days]
    for j in range(n_services):
        rng.shuffle(slots)
        placed = False
        for i, d in slots:
            last, end = tail.get((i, d), (None, day_lo))
            earliest = end if last is None else end + travel[last][j]
            room = day_hi - earliest - durations[j]
            if room < 0:
                continue
            t = earliest + _floor(rng.uniform(0, min(prof.max_gap, room)), step)
            witness[j], owner[j], day_of[j] = t, i, d
            tail[(i, d)] = (j, t + durations[j])
            placed = True
            break
        if not placed:
            raise InstanceError([f"generator: {n_services} services do not fit on {n_caregivers} "
                                 f"caregivers over {len(days)} days; use more caregivers"])

    services = []
    for j in range(n_services):
        eta, t = durations[j], witness[j]
        a_lo = max(day_lo, t - _uniform_step(rng, 0, _floor(prof.window_slack[1], step), step))
        a_hi = min(day_hi, t + eta + _uniform_step(rng, _ceil(prof.window_slack[0], step),
                                                   _floor(prof.window_slack[1], step), step))
        b_lo = _uniform_step(rng, a_lo, a_hi - eta, step)
        b_hi = _uniform_step(rng, b_lo + eta, a_hi, step)
        services.append(Service(id=j + 1, duration=eta, day=day_of[j], hard_window=(a_lo, a_hi),
                                soft_window=(b_lo, b_hi), user_id=j + 1))

    expected_load = sum(durations) / n_caregivers
    caregivers = []
    for i in range(1, n_caregivers + 1):
        affinity = {}
        for j in range(n_services):
            if owner[j] == i or rng.random() < prof.compat_prob:
                affinity[j + 1] = rng.randint(0, 5)
        weekly = _floor(expected_load * rng.uniform(*prof.weekly_ratio), step)
        caregivers.append(Caregiver(
            id=i,
            availability={d: (day_lo, day_hi) for d in days},
            daily_max={d: daily_max for d in days},
            weekly_agreed=max(0, weekly),
            affinity=affinity,
        ))

    # a witness day may be longer than daily_max; widen that caregiver-day only
    for i in range(1, n_caregivers + 1):
        for d in days:
            members = sorted((witness[j], j) for j in range(n_services) if owner[j] == i and day_of[j] == d)
            if not members:
                continue
            span = members[-1][0] + durations[members[-1][1]] - members[0][0]
            if span > caregivers[i - 1].daily_max[d]:
                caregivers[i - 1].daily_max[d] = min(day_hi - day_lo, _ceil(span, step))

    planted = []
    for (i, d) in sorted({(owner[j], day_of[j]) for j in range(n_services)}):
        members = sorted((witness[j], j) for j in range(n_services) if owner[j] == i and day_of[j] == d)
        planted.append({"caregiver": i, "day": d, "services": [j + 1 for _, j in members],
                        "starts": [t for t, _ in members]})
    meta = {
        "generator": "hcsp.generate_instance",
        "witness": {"routes": planted},
        "profile": prof.name,
        "seed": seed,
        "step": step,
        "soft_window_law": "uniform sub-interval of the hard window, width >= duration",
        "affinity_law": "uniform integer 0..5 on compatible pairs",
    }
    return Instance(services=tuple(services), caregivers=tuple(caregivers), travel=travel,
                    pi_min=prof.pi_min, meta=meta)


def generate_suite(sizes: Iterable[int] = (10, 15), count: int = 10, n_caregivers: int = 3,
                   seed: int = 0, profile: str | None = None) -> dict[str, Instance]:
    """Batch of instances named ``<size>_<nn>`` (e.g. ``10_01``)."""
    out = {}
    for size in sizes:
        prof = profile or (f"solomon-{size}" if f"solomon-{size}" in PROFILES else "default")
        for k in range(1, count + 1):
            out[f"{size}_{k:02d}"] = generate_instance(size, n_caregivers, seed + 1000 * size + k, prof)
    return out


# --------------------------------------------------------------------------
# Solomon benchmark adaptation

def read_solomon(path: str | Path) -> list[dict]:
    """Customer rows of a Solomon VRPTW text file (depot excluded).

    Returns dicts with keys ``x, y, ready, due, service`` in file units.
    """
    rows = []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if len(parts) == 7 and all(p.replace(".", "", 1).isdigit() for p in parts):
            cust, x, y, _demand, ready, due, service = (float(p) for p in parts)
            rows.append({"id": int(cust), "x": x, "y": y, "ready": ready, "due": due, "service": service})
    if not rows:
        raise InstanceError([f"{path}: no customer rows found"])
    return [r for r in rows if r["id"] != 0]


def from_solomon(path: str | Path, n_services: int, n_caregivers: int, seed: int,
                 days: int = 1, day_start: int = 420, daily_max: int = 480,
                 compat_prob: float = 0.7) -> Instance:
    """Adapt the first ``n_services`` customers of a Solomon file.

    Durations, hard windows and distances come from the file (one file unit
    = one minute, shifted to ``day_start``); soft windows, affinities and
    compatibilities are sampled.
    """
    rows = read_solomon(path)[:n_services]
    rng = random.Random(f"solomon:{seed}")
    services = []
    for j, r in enumerate(rows):
        eta = int(round(r["service"]))
        a_lo = min(DAY_MINUTES, day_start + int(round(r["ready"])))
        a_hi = min(DAY_MINUTES, day_start + int(round(r["due"])) + eta)
        b_lo = rng.randint(a_lo, max(a_lo, a_hi - eta))
        b_hi = rng.randint(min(a_hi, b_lo + eta), a_hi)
        services.append(Service(id=j + 1, duration=eta, day=rng.randint(1, days),
                                hard_window=(a_lo, a_hi), soft_window=(b_lo, b_hi), user_id=r["id"]))
    travel = tuple(tuple(0 if j == k else int(math.ceil(math.dist((a["x"], a["y"]), (b["x"], b["y"]))))
                         for k, b in enumerate(rows)) for j, a in enumerate(rows))
    lo = min(s.hard_window[0] for s in services)
    hi = max(s.hard_window[1] for s in services)
    cap = min(daily_max, hi - lo)
    caregivers = []
    for i in range(1, n_caregivers + 1):
        aff = {s.id: rng.randint(0, 5) for s in services if rng.random() < compat_prob}
        caregivers.append(Caregiver(id=i, availability={d: (lo, hi) for d in range(1, days + 1)},
                                    daily_max={d: cap for d in range(1, days + 1)},
                                    weekly_agreed=cap * days // 2, affinity=aff))
    for s in services:
        if not any(c.can_serve(s.id) for c in caregivers):
            pick = caregivers[rng.randrange(n_caregivers)]
            pick.affinity[s.id] = rng.randint(0, 5)
    return Instance(services=tuple(services), caregivers=tuple(caregivers), travel=travel,
                    meta={"source": str(Path(path).name), "seed": seed})
