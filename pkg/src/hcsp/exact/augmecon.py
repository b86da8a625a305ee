"""Augmented epsilon-constraint method with bypass (AUGMECON2).

Both objectives are minimized.  ``f2`` is swept from its value at the
cost-first optimum (``ub2``) down to its value at the welfare-first optimum
(``lb2``); each grid point solves

    min f1 - eps * S2 / r2   s.t.  f2 + S2 = e2,  S2 >= 0

and the surplus ``S2`` lets the loop skip grid points that would return
the same solution.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from ..archive import ParetoArchive
from ..instance import Instance
from .backends import Backend, BackendError, Point, active_days, epsilon_model
from .lpformat import write_lp
from .milp import build_milp

log = logging.getLogger(__name__)


class InfeasibleProblem(RuntimeError):
    pass


@dataclass
class GridConfig:
    g2: int = 100
    eps: float = 1e-3
    full: bool = False
    # filled in by the run
    lb2: int | None = None
    ub2: int | None = None
    r2: int | None = None

    def __post_init__(self):
        if self.g2 < 1:
            raise ValueError("g2 must be >= 1")
        if not 1e-6 <= self.eps <= 1e-3:
            raise ValueError("eps must lie in [1e-6, 1e-3]")

    def snapshot(self) -> dict:
        return asdict(self)


@dataclass
class GridStep:
    i2: int
    e2: Fraction
    status: str
    f1: int | None = None
    f2: int | None = None
    surplus: Fraction | None = None
    bypass: int = 0

    def as_dict(self) -> dict:
        d = asdict(self)
        d["e2"] = float(self.e2)
        d["surplus"] = None if self.surplus is None else float(self.surplus)
        return d


@dataclass
class AugmeconResult:
    archive: ParetoArchive
    config: GridConfig
    steps: list[GridStep] = field(default_factory=list)
    lp_files: list[str] = field(default_factory=list)


def lexicographic_solve(backend: Backend, direction: str) -> Point:
    """Welfare-first (``"wc"``) or cost-first (``"cw"``) optimum."""
    if direction not in ("wc", "cw"):
        raise ValueError(f"unknown direction {direction!r}")
    pt = backend.lexicographic(direction)
    if pt is None:
        raise InfeasibleProblem("instance has no feasible solution")
    return pt


def augmecon2(backend: Backend, instance: Instance, config: GridConfig | None = None,
              emit_lp: str | Path | None = None) -> AugmeconResult:
    cfg = config or GridConfig()
    x_wc = lexicographic_solve(backend, "wc")
    x_cw = lexicographic_solve(backend, "cw")
    lb2, ub2 = x_wc.f2, x_cw.f2
    r2 = ub2 - lb2
    if r2 < 0:
        raise BackendError(f"inconsistent payoff table: f2(wc)={lb2} > f2(cw)={ub2}")
    cfg.lb2, cfg.ub2, cfg.r2 = lb2, ub2, r2
    g2 = max(1, r2) if cfg.full else cfg.g2
    result = AugmeconResult(ParetoArchive(), cfg)
    for pt in (x_cw, x_wc):
        result.archive.update(pt.objectives, pt.solution, tag="payoff")
    if r2 == 0:
        return result

    model = None
    if emit_lp is not None:
        emit_dir = Path(emit_lp)
        emit_dir.mkdir(parents=True, exist_ok=True)
        model = getattr(backend, "model", None) or build_milp(instance, days=active_days(instance))

    step = Fraction(r2, g2)
    eps = Fraction(cfg.eps)
    i2 = 1
    while i2 <= g2:
        e2 = ub2 - i2 * step
        if model is not None:
            sub, obj = epsilon_model(model, e2, eps, r2)
            path = emit_dir / f"grid_{i2:05d}.lp"
            write_lp(sub, path, obj, title=f"grid point i2={i2} e2={float(e2):.6g}")
            result.lp_files.append(str(path))
        try:
            pt = backend.epsilon(e2, eps, r2)
        except BackendError as exc:
            log.warning("grid point %d failed: %s", i2, exc)
            result.steps.append(GridStep(i2, e2, f"error: {exc}"))
            i2 += 1
            continue
        if pt is None:
            result.steps.append(GridStep(i2, e2, "infeasible"))
            break
        surplus = e2 - pt.f2
        b = math.floor(surplus / step)
        result.steps.append(GridStep(i2, e2, "optimal", pt.f1, pt.f2, surplus, b))
        result.archive.update(pt.objectives, pt.solution, tag=f"grid-{i2}")
        i2 += b + 1
    return result
