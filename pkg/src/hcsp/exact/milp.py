"""Mixed integer linear model of the scheduling problem.

Index conventions: services are 1..n, the start dummy is 0 and the end
dummy is n+1.  Variables are created for every caregiver and every day in
``days`` (1..7 unless restricted).  Arcs touching a service on a day it
does not belong to, or on a day the caregiver does not work, get an upper
bound of 0; they still count as variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..evaluation import ObjectiveWeights, Route, Solution
from ..instance import DAYS, Instance

INF = math.inf


@dataclass
class Row:
    name: str
    coefs: dict[int, float]
    lo: float
    hi: float


@dataclass
class MilpModel:
    names: list[str] = field(default_factory=list)
    lb: list[float] = field(default_factory=list)
    ub: list[float] = field(default_factory=list)
    integer: list[bool] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)
    f1: dict[int, float] = field(default_factory=dict)
    f2: dict[int, float] = field(default_factory=dict)
    index: dict[str, int] = field(default_factory=dict)
    days: tuple[int, ...] = DAYS
    n_services: int = 0
    n_caregivers: int = 0
    strict_eps: float = 1.0

    def add_var(self, name: str, lb: float = 0.0, ub: float = INF, integer: bool = False) -> int:
        k = len(self.names)
        self.names.append(name)
        self.lb.append(lb)
        self.ub.append(ub)
        self.integer.append(integer)
        self.index[name] = k
        return k

    def add_row(self, name: str, coefs: dict[int, float], lo: float = -INF, hi: float = INF) -> None:
        self.rows.append(Row(name, {k: v for k, v in coefs.items() if v != 0}, lo, hi))

    def var(self, name: str) -> int:
        return self.index[name]

    @property
    def n_vars(self) -> int:
        return len(self.names)

    def copy(self) -> "MilpModel":
        return MilpModel(list(self.names), list(self.lb), list(self.ub), list(self.integer),
                         [Row(r.name, dict(r.coefs), r.lo, r.hi) for r in self.rows],
                         dict(self.f1), dict(self.f2), dict(self.index), self.days,
                         self.n_services, self.n_caregivers, self.strict_eps)

    def objective_value(self, which: str, values) -> float:
        coefs = self.f1 if which == "f1" else self.f2
        return sum(c * values[k] for k, c in coefs.items())


def variable_count(n_services: int, n_caregivers: int, n_days: int = 7) -> int:
    """Closed-form number of variables of ``build_milp``."""
    n = n_services
    per_day = (n + 1) ** 2 - n + (n + 2) + n * (n - 1) + 4
    return n_caregivers * n_days * per_day + n_caregivers + 2 * n


def _add(acc: dict[int, float], k: int, c: float) -> None:
    acc[k] = acc.get(k, 0.0) + c


def build_milp(instance: Instance, weights: ObjectiveWeights | None = None, days=None,
               strict_eps: float = 1.0, integer_times: bool = True) -> MilpModel:
    """Model with both objectives stored as coefficient maps (``f1``, ``f2``).

    ``strict_eps`` separates a paid largest break (below ``pi_min``) from an
    unpaid one; with integer minutes 1 is the natural choice, and
    ``integer_times`` keeps start times on whole minutes so decoded
    solutions evaluate to the model's objective values.
    """
    inst = instance
    w = weights or ObjectiveWeights.from_instance(inst)
    n = inst.n_services
    S = list(range(1, n + 1))
    end = n + 1
    days = tuple(DAYS if days is None else days)
    m = MilpModel(days=days, n_services=n, n_caregivers=inst.n_caregivers, strict_eps=strict_eps)
    svc = {j: inst.service(j) for j in S}
    eta = {j: svc[j].duration for j in S}

    def theta(j, k):
        return 0 if k == end else inst.theta(j, k)

    X, T, Y = {}, {}, {}
    for c in inst.caregivers:
        i = c.id
        for d in days:
            works = c.works(d)
            for j in [0] + S:
                for k in S + [end]:
                    if j == k:
                        continue
                    ok = works or (j == 0 and k == end)
                    for h in (j, k):
                        if 1 <= h <= n and (svc[h].day != d or not c.can_serve(h)):
                            ok = False
                    X[i, d, j, k] = m.add_var(f"x_{i}_{d}_{j}_{k}", 0, 1 if ok else 0, True)
            for j in [0] + S + [end]:
                T[i, d, j] = m.add_var(f"t_{i}_{d}_{j}", integer=integer_times)
            for j in S:
                for k in S:
                    if j != k:
                        Y[i, d, j, k] = m.add_var(f"y_{i}_{d}_{j}_{k}", 0, 1, True)
            m.add_var(f"ybar_{i}_{d}", 0, 1, True)
            m.add_var(f"u_{i}_{d}", 0, 1, True)
            m.add_var(f"r_{i}_{d}")
            m.add_var(f"rhat_{i}_{d}")
    Z = {c.id: m.add_var(f"z_{c.id}") for c in inst.caregivers}
    VS = {j: m.add_var(f"vs_{j}") for j in S}
    VE = {j: m.add_var(f"ve_{j}") for j in S}

    N = [c.id for c in inst.caregivers]

    def out_arcs(i, d, j):
        return [X[i, d, j, k] for k in S + [end] if k != j]

    # coverage
    for j in S:
        m.add_row(f"assign_out_{j}", {X[i, d, j, k]: 1 for i in N for d in days for k in S + [end] if k != j}, 1, 1)
    for k in S:
        m.add_row(f"assign_in_{k}", {X[i, d, j, k]: 1 for i in N for d in days for j in [0] + S if j != k}, 1, 1)
    for i in N:
        for j in S:
            rho = 1 if inst.caregiver(i).can_serve(j) else 0
            m.add_row(f"compatible_{i}_{j}", {x: 1 for d in days for x in out_arcs(i, d, j)}, hi=rho)

    for i in N:
        cg = inst.caregiver(i)
        for d in days:
            g_lo, g_hi = cg.availability.get(d, (0, 0))
            cap = cg.daily_max.get(d, 0)
            m.add_row(f"leave_start_{i}_{d}", {X[i, d, 0, k]: 1 for k in S + [end]}, 1, 1)
            m.add_row(f"reach_end_{i}_{d}", {X[i, d, j, end]: 1 for j in [0] + S}, 1, 1)
            for h in S:
                coefs: dict[int, float] = {}
                for j in [0] + S:
                    if j != h:
                        _add(coefs, X[i, d, j, h], 1)
                for k in S + [end]:
                    if k != h:
                        _add(coefs, X[i, d, h, k], -1)
                m.add_row(f"flow_{i}_{d}_{h}", coefs, 0, 0)
            for j in S:
                a_lo, a_hi = svc[j].hard_on(d)
                arcs = out_arcs(i, d, j)
                m.add_row(f"hard_start_{i}_{d}_{j}", {**{x: a_lo for x in arcs}, T[i, d, j]: -1}, hi=0)
                m.add_row(f"hard_end_{i}_{d}_{j}", {**{x: -(a_hi - eta[j]) for x in arcs}, T[i, d, j]: 1}, hi=0)
            for j in S:
                a_hi = svc[j].hard_on(d)[1]
                for k in S + [end]:
                    if j == k:
                        continue
                    x = X[i, d, j, k]
                    # t_j + (eta + theta) x <= t_k + a_hi (1 - x)
                    m.add_row(f"travel_{i}_{d}_{j}_{k}",
                              {T[i, d, j]: 1, T[i, d, k]: -1, x: eta[j] + theta(j, k) + a_hi}, hi=a_hi)
            t0, ts = T[i, d, 0], T[i, d, end]
            m.add_row(f"available_from_{i}_{d}", {t0: 1}, lo=g_lo)
            m.add_row(f"available_until_{i}_{d}", {ts: 1}, hi=g_hi)
            for k in S + [end]:
                x = X[i, d, 0, k]
                m.add_row(f"day_start_le_{i}_{d}_{k}", {t0: 1, T[i, d, k]: -1, x: g_hi}, hi=g_hi)
                m.add_row(f"day_start_ge_{i}_{d}_{k}", {t0: 1, T[i, d, k]: -1, x: -g_hi}, lo=-g_hi)
            for j in S:
                x = X[i, d, j, end]
                m.add_row(f"day_end_{i}_{d}_{j}", {ts: 1, T[i, d, j]: -1, x: g_hi}, hi=eta[j] + g_hi)
            rhat, r = m.var(f"rhat_{i}_{d}"), m.var(f"r_{i}_{d}")
            ybar, u = m.var(f"ybar_{i}_{d}"), m.var(f"u_{i}_{d}")
            m.add_row(f"daily_max_{i}_{d}", {ts: 1, t0: -1, rhat: -1}, hi=cap)
            for j in S:
                for k in S:
                    if j == k:
                        continue
                    x, y = X[i, d, j, k], Y[i, d, j, k]
                    c0 = eta[j] + inst.theta(j, k)
                    # r >= t_k - t_j - c0 - g_hi (1 - x)
                    m.add_row(f"break_ge_gap_{i}_{d}_{j}_{k}", {r: 1, T[i, d, k]: -1, T[i, d, j]: 1, x: -g_hi},
                              lo=-c0 - g_hi)
                    # r <= t_k - t_j - c0 + g_hi (1 - x) + g_hi (1 - y)
                    m.add_row(f"break_le_gap_{i}_{d}_{j}_{k}", {r: 1, T[i, d, k]: -1, T[i, d, j]: 1, x: g_hi, y: g_hi},
                              hi=-c0 + 2 * g_hi)
                    m.add_row(f"break_on_arc_{i}_{d}_{j}_{k}", {y: 1, x: -1}, hi=0)
            m.add_row(f"no_break_{i}_{d}", {r: 1, ybar: g_hi}, hi=g_hi)
            m.add_row(f"one_break_{i}_{d}", {**{Y[i, d, j, k]: 1 for j in S for k in S if j != k}, ybar: 1}, 1, 1)
            pi = inst.pi_min
            width = g_hi - g_lo
            m.add_row(f"unpaid_if_long_{i}_{d}", {r: 1, u: -pi}, lo=0)
            m.add_row(f"paid_if_short_{i}_{d}", {r: 1, u: -width}, hi=pi - strict_eps)
            m.add_row(f"deduct_only_unpaid_{i}_{d}", {rhat: 1, u: -width}, hi=0)
            m.add_row(f"deduct_le_break_{i}_{d}", {rhat: 1, r: -1}, hi=0)
            m.add_row(f"deduct_ge_break_{i}_{d}", {rhat: 1, r: -1, u: -width}, lo=-width)
        coefs = {Z[i]: 1}
        for d in days:
            _add(coefs, T[i, d, end], -1)
            _add(coefs, T[i, d, 0], 1)
            _add(coefs, m.var(f"rhat_{i}_{d}"), 1)
        m.add_row(f"overtime_{i}", coefs, lo=-cg.weekly_agreed)

    for j in S:
        early: dict[int, float] = {VS[j]: 1}
        late: dict[int, float] = {VE[j]: 1}
        for d in days:
            b_lo, b_hi = svc[j].soft_on(d)
            for i in N:
                for x in out_arcs(i, d, j):
                    _add(early, x, -b_lo)
                    _add(late, x, -(eta[j] - b_hi))
                _add(early, T[i, d, j], 1)
                _add(late, T[i, d, j], -1)
        m.add_row(f"early_{j}", early, lo=0)
        m.add_row(f"late_{j}", late, lo=0)

    for i in N:
        _add(m.f1, Z[i], w.w1)
        for d in days:
            _add(m.f1, T[i, d, end], w.w2)
            _add(m.f1, T[i, d, 0], -w.w2)
            _add(m.f1, m.var(f"rhat_{i}_{d}"), -w.w2)
            for j in S:
                lam = inst.caregiver(i).affinity_for(j)
                if lam:
                    for x in out_arcs(i, d, j):
                        _add(m.f2, x, w.w3 * lam)
    for j in S:
        _add(m.f2, VS[j], w.w4)
        _add(m.f2, VE[j], w.w4)
    for coefs in (m.f1, m.f2):
        for k, v in coefs.items():
            if v != int(v):
                raise ValueError("objective coefficients must be integers")
    return m


def decode(model: MilpModel, values, instance: Instance) -> Solution:
    """Routes and rounded start times from a variable assignment."""
    n = model.n_services
    end = n + 1
    routes = []
    for c in instance.caregivers:
        for d in model.days:
            order, starts = [], []
            cur, seen = 0, set()
            while True:
                nxt = None
                for k in list(range(1, n + 1)) + [end]:
                    if k != cur and values[model.index[f"x_{c.id}_{d}_{cur}_{k}"]] > 0.5:
                        nxt = k
                        break
                if nxt is None or nxt == end or nxt in seen:
                    break
                seen.add(nxt)
                order.append(nxt)
                starts.append(int(round(values[model.index[f"t_{c.id}_{d}_{nxt}"]])))
                cur = nxt
            if order:
                routes.append(Route(c.id, d, tuple(order), tuple(starts)))
    return Solution(instance, routes)
