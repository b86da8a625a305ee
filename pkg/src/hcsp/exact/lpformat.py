"""CPLEX LP text format writer and a reader for ``name=value`` solution files."""

from __future__ import annotations

import math
from pathlib import Path

from .milp import MilpModel


def _num(v: float) -> str:
    if float(v).is_integer():
        return str(int(v))
    return format(v, ".15g")


def _terms(coefs: dict[int, float], names: list[str]) -> list[str]:
    out = []
    for k in sorted(coefs):
        c = coefs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        out.append(f"{sign} {names[k]}" if mag == 1 else f"{sign} {_num(mag)} {names[k]}")
    if not out:
        out = ["+ 0 " + names[0]]
    if out[0].startswith("+ "):
        out[0] = out[0][2:]
    return out


def _wrap(head: str, terms: list[str], tail: str = "", per_line: int = 6) -> list[str]:
    lines = []
    for k in range(0, len(terms), per_line):
        chunk = " ".join(terms[k:k + per_line])
        lines.append((head if k == 0 else "   ") + " " + chunk)
    if tail:
        lines[-1] += " " + tail
    return lines


def lp_text(model: MilpModel, objective: dict[int, float], sense: str = "min", title: str = "") -> str:
    """Deterministic LP text for ``model`` with the given objective coefficients."""
    names = model.names
    out = []
    if title:
        out.append(f"\\ {title}")
    out.append("Minimize" if sense == "min" else "Maximize")
    out.extend(_wrap(" obj:", _terms(objective, names)))
    out.append("Subject To")
    for row in model.rows:
        terms = _terms(row.coefs, names)
        if row.lo == row.hi:
            out.extend(_wrap(f" {row.name}:", terms, f"= {_num(row.hi)}"))
            continue
        if row.lo > -math.inf:
            suffix = "_lo" if row.hi < math.inf else ""
            out.extend(_wrap(f" {row.name}{suffix}:", terms, f">= {_num(row.lo)}"))
        if row.hi < math.inf:
            suffix = "_hi" if row.lo > -math.inf else ""
            out.extend(_wrap(f" {row.name}{suffix}:", terms, f"<= {_num(row.hi)}"))
    out.append("Bounds")
    for k, name in enumerate(names):
        lb, ub = model.lb[k], model.ub[k]
        if lb == ub:
            out.append(f" {name} = {_num(lb)}")
        elif lb == 0 and ub == math.inf:
            continue
        elif ub == math.inf:
            out.append(f" {name} >= {_num(lb)}" if lb > -math.inf else f" {name} free")
        else:
            lo = "-inf" if lb == -math.inf else _num(lb)
            out.append(f" {lo} <= {name} <= {_num(ub)}")
    ints = [names[k] for k in range(len(names)) if model.integer[k]]
    if ints:
        out.append("Generals")
        for k in range(0, len(ints), 8):
            out.append(" " + " ".join(ints[k:k + 8]))
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp(model: MilpModel, path: str | Path, objective: dict[int, float] | None = None, title: str = "") -> None:
    Path(path).write_text(lp_text(model, model.f1 if objective is None else objective, title=title))


def read_solution(path: str | Path, model: MilpModel) -> list[float]:
    """Values from ``name=value`` (or ``name value``) lines; missing variables read as 0."""
    values = [0.0] * model.n_vars
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith(("#", "\\")):
            continue
        name, _, val = line.replace("=", " ").partition(" ")
        k = model.index.get(name.strip())
        if k is not None:
            values[k] = float(val.strip())
    return values
