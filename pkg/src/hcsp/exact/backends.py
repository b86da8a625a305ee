"""Solvers for the single-objective subproblems used by the exact methods.

Every backend answers two questions:

* ``lexicographic(direction)``: optimum of one objective, ties broken by the other;
* ``epsilon(e2, eps, r2)``: minimize ``f1 - eps * S2 / r2`` subject to
  ``f2 + S2 = e2`` and ``S2 >= 0``.

Answers are ``Point`` objects or None when the subproblem is infeasible.
"""

from __future__ import annotations

import subprocess
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from ..evaluation import Solution
from ..instance import Instance
from .lpformat import read_solution, write_lp
from .milp import MilpModel, build_milp, decode


class BackendError(RuntimeError):
    pass


@dataclass
class Point:
    f1: int
    f2: int
    solution: Solution | None = None

    @property
    def objectives(self) -> tuple[int, int]:
        return (self.f1, self.f2)


class Backend(Protocol):
    name: str

    def lexicographic(self, direction: str) -> Point | None: ...

    def epsilon(self, e2: Fraction, eps: Fraction, r2: int) -> Point | None: ...


def active_days(instance: Instance) -> tuple[int, ...]:
    return tuple(sorted({s.day for s in instance.services}))


def epsilon_model(model: MilpModel, e2: Fraction, eps: Fraction, r2: int) -> tuple[MilpModel, dict[int, float]]:
    """Copy of ``model`` with the slack variable, the level row and the augmented objective."""
    sub = model.copy()
    s2 = sub.add_var("S2")
    sub.add_row("f2_level", {**model.f2, s2: 1.0}, float(e2), float(e2))
    obj = dict(model.f1)
    obj[s2] = -float(eps) / max(1, r2)
    return sub, obj


def bound_model(model: MilpModel, which: str, bound: float) -> MilpModel:
    sub = model.copy()
    sub.add_row(f"{which}_bound", dict(model.f1 if which == "f1" else model.f2), hi=bound)
    return sub


class _ModelBackend:
    """Shared lexicographic/epsilon logic on top of a ``_solve(model, objective)`` primitive."""

    name = "model"

    def __init__(self, instance: Instance, days: Sequence[int] | None = None):
        self.instance = instance
        self.model = build_milp(instance, days=active_days(instance) if days is None else days)
        self.solves = 0

    def _solve(self, model: MilpModel, objective: dict[int, float]) -> list[float] | None:
        raise NotImplementedError

    def _point(self, values) -> Point:
        sol = decode(self.model, values, self.instance)
        f1, f2 = sol.objectives
        return Point(f1, f2, sol)

    def lexicographic(self, direction: str) -> Point | None:
        first, second = ("f2", "f1") if direction == "wc" else ("f1", "f2")
        m = self.model
        vals = self._solve(m, m.f2 if first == "f2" else m.f1)
        if vals is None:
            return None
        best = round(m.objective_value(first, vals))
        sub = bound_model(m, first, best + 0.5)
        vals = self._solve(sub, m.f1 if second == "f1" else m.f2)
        if vals is None:
            raise BackendError("second lexicographic stage infeasible")
        return self._point(vals)

    def epsilon(self, e2: Fraction, eps: Fraction, r2: int) -> Point | None:
        sub, obj = epsilon_model(self.model, e2, eps, r2)
        vals = self._solve(sub, obj)
        return None if vals is None else self._point(vals)


class MilpBackend(_ModelBackend):
    """In-process branch and bound through ``scipy.optimize.milp`` (HiGHS)."""

    name = "milp"

    def __init__(self, instance: Instance, days: Sequence[int] | None = None, time_limit: float | None = None):
        super().__init__(instance, days)
        self.time_limit = time_limit

    def _solve(self, model: MilpModel, objective: dict[int, float]) -> list[float] | None:
        from scipy.optimize import Bounds, LinearConstraint, milp
        from scipy.sparse import coo_array

        self.solves += 1
        nv = model.n_vars
        c = np.zeros(nv)
        for k, v in objective.items():
            c[k] = v
        rows, cols, data = [], [], []
        lo, hi = [], []
        for r_i, row in enumerate(model.rows):
            for k, v in row.coefs.items():
                rows.append(r_i)
                cols.append(k)
                data.append(v)
            lo.append(row.lo)
            hi.append(row.hi)
        A = coo_array((data, (rows, cols)), shape=(len(model.rows), nv)).tocsr()
        options = {"disp": False, "mip_rel_gap": 0.0}
        if self.time_limit:
            options["time_limit"] = self.time_limit
        res = milp(c, constraints=LinearConstraint(A, np.array(lo), np.array(hi)),
                   integrality=np.array(model.integer, dtype=int),
                   bounds=Bounds(np.array(model.lb), np.array(model.ub)), options=options)
        if res.status == 2:  # infeasible
            return None
        if res.x is None:
            raise BackendError(f"milp failed: {res.message}")
        if res.status != 0:
            raise BackendError(f"milp stopped early ({res.message}); incumbent objective {res.fun}")
        return list(res.x)


class ExternalBackend(_ModelBackend):
    """Runs an external solver on emitted LP files.

    ``command`` is a list of arguments in which ``{lp}`` and ``{sol}`` are
    replaced by the model and solution paths.  The solver must write
    ``name=value`` lines to the solution file; a line ``status=infeasible``
    marks an infeasible model.
    """

    name = "external"

    def __init__(self, instance: Instance, command: Sequence[str], workdir: str | Path | None = None,
                 days: Sequence[int] | None = None, timeout: float | None = None):
        super().__init__(instance, days)
        self.command = list(command)
        self.workdir = Path(workdir) if workdir else Path(tempfile.mkdtemp(prefix="hcsp-lp-"))
        self.workdir.mkdir(parents=True, exist_ok=True)
        self.timeout = timeout

    def _solve(self, model: MilpModel, objective: dict[int, float]) -> list[float] | None:
        self.solves += 1
        lp = self.workdir / f"model_{self.solves:04d}.lp"
        sol = self.workdir / f"model_{self.solves:04d}.sol"
        write_lp(model, lp, objective)
        args = [a.replace("{lp}", str(lp)).replace("{sol}", str(sol)) for a in self.command]
        try:
            proc = subprocess.run(args, capture_output=True, text=True, timeout=self.timeout)
        except subprocess.TimeoutExpired as exc:
            raise BackendError(f"external solver timed out after {self.timeout}s") from exc
        if proc.returncode != 0:
            raise BackendError(f"external solver exited with {proc.returncode}: {proc.stderr.strip()[:500]}")
        if not sol.exists():
            raise BackendError("external solver wrote no solution file")
        text = sol.read_text()
        if "status=infeasible" in text.replace(" ", ""):
            return None
        return read_solution(sol, model)[: self.model.n_vars]
