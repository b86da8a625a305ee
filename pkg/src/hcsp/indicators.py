"""Quality indicators comparing an approximation front A with a reference front RF.

CV is computed on raw objective values; the distance based indicators
(GD, IGD, EPS) are usually fed normalized fronts from ``normalize_fronts``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .archive import nondominated
from .evaluation import dominates


def _arr(points) -> np.ndarray:
    a = np.asarray(points, dtype=float)
    if a.ndim != 2 or len(a) == 0:
        raise ValueError("front must be a non-empty list of objective vectors")
    return a


def _distances(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """For each point of ``src`` the Euclidean distance to the nearest point of ``dst``."""
    return np.sqrt(((src[:, None, :] - dst[None, :, :]) ** 2).sum(-1)).min(axis=1)


def coverage(rf, a) -> float:
    """Fraction of A strictly dominated by some point of RF."""
    a = [tuple(p) for p in a]
    if not a:
        raise ValueError("A must be non-empty")
    rf = [tuple(p) for p in rf]
    return sum(any(dominates(y, x) for y in rf) for x in a) / len(a)


def gd(rf, a) -> float:
    A, R = _arr(a), _arr(rf)
    return float(np.sqrt((_distances(A, R) ** 2).sum()) / len(A))


def igd(rf, a) -> float:
    A, R = _arr(a), _arr(rf)
    return float(np.sqrt((_distances(R, A) ** 2).sum()) / len(R))


def epsilon(rf, a) -> float:
    """Additive epsilon: smallest shift letting A weakly cover every RF point."""
    A, R = _arr(a), _arr(rf)
    diff = A[None, :, :] - R[:, None, :]  # [y, x, k]
    return float(diff.max(axis=2).min(axis=1).max())


@dataclass
class FrontReport:
    cv: float
    gd: float
    igd: float
    eps: float
    size_a: int
    size_rf: int
    d: list[float] = field(default_factory=list)
    d_ref: list[float] = field(default_factory=list)
    normalized: bool = True

    def as_row(self) -> dict:
        return {"CV": self.cv, "EPS": self.eps, "GD": self.gd, "IGD": self.igd,
                "size_A": self.size_a, "size_RF": self.size_rf}


def report(rf, a, rf_raw=None, a_raw=None, normalized: bool = True) -> FrontReport:
    """All four indicators; CV uses the raw fronts when given."""
    A, R = _arr(a), _arr(rf)
    cv = coverage(rf_raw if rf_raw is not None else rf, a_raw if a_raw is not None else a)
    return FrontReport(cv=cv, gd=gd(R, A), igd=igd(R, A), eps=epsilon(R, A), size_a=len(A), size_rf=len(R),
                       d=_distances(A, R).tolist(), d_ref=_distances(R, A).tolist(), normalized=normalized)


@dataclass
class NormalizedFronts:
    reference: list[tuple]
    fronts: list[list[tuple]]
    reference_norm: np.ndarray
    fronts_norm: list[np.ndarray]
    lower: np.ndarray
    upper: np.ndarray


def normalize_fronts(fronts: Sequence[Sequence[tuple]]) -> NormalizedFronts:
    """Union reference front plus min-max normalization over the union of all points.

    A dimension with no spread maps to 0.
    """
    if not fronts:
        raise ValueError("need at least one front")
    union = [tuple(p) for f in fronts for p in f]
    if not union:
        raise ValueError("all fronts are empty")
    ref = nondominated(union)
    U = np.asarray(union, dtype=float)
    lo, hi = U.min(axis=0), U.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)

    def norm(pts) -> np.ndarray:
        x = (np.asarray(pts, dtype=float).reshape(-1, U.shape[1]) - lo) / span
        x[:, hi <= lo] = 0.0
        return x

    return NormalizedFronts(reference=ref, fronts=[[tuple(p) for p in f] for f in fronts],
                            reference_norm=norm(ref), fronts_norm=[norm(f) for f in fronts], lower=lo, upper=hi)


def compare(fronts: dict[str, Sequence[tuple]]) -> dict[str, FrontReport]:
    """Indicator report of each named front against the union reference front."""
    names = list(fronts)
    nf = normalize_fronts([fronts[n] for n in names])
    return {n: report(nf.reference_norm, nf.fronts_norm[k], rf_raw=nf.reference, a_raw=nf.fronts[k])
            for k, n in enumerate(names)}
