"""Exact linear programming over the rationals.

All variables are nonnegative.  Rows of the form ``x >= 0`` may still be
listed (and are checked by :func:`verify_point`), but the solver treats them
as the variable domain rather than as tableau rows.

The solver is a dense two-phase simplex with Bland's rule, so it terminates
on degenerate problems and its output depends only on the order of
variables and constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

LE, EQ, GE = "<=", "=", ">="
_FLIP = {LE: GE, GE: LE, EQ: EQ}


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping[str, Fraction]
    relation: str
    rhs: Fraction
    name: str = ""

    def __post_init__(self):
        if self.relation not in _FLIP:
            raise ValueError(f"unknown relation {self.relation!r}")

    def lhs(self, point: Mapping[str, Fraction]) -> Fraction:
        return sum((c * point[v] for v, c in self.coeffs.items()), Fraction(0))

    def holds(self, point: Mapping[str, Fraction]) -> bool:
        d = self.lhs(point) - self.rhs
        return d <= 0 if self.relation == LE else d >= 0 if self.relation == GE else d == 0

    @property
    def is_domain(self) -> bool:
        """True for rows that only restate nonnegativity of one variable."""
        if self.rhs != 0 or len(self.coeffs) != 1:
            return False
        (c,) = self.coeffs.values()
        return (self.relation == GE and c > 0) or (self.relation == LE and c < 0)


@dataclass(frozen=True)
class Objective:
    sense: str  # "min" or "max"
    coeffs: Mapping[str, Fraction]

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise ValueError(f"unknown objective sense {self.sense!r}")


@dataclass(frozen=True)
class LinearProgram:
    variables: tuple[str, ...]
    constraints: tuple[Constraint, ...]
    objective: Objective | None = None

    def __post_init__(self):
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise ValueError("duplicate variable ids")
        rows = list(self.constraints) + ([self.objective] if self.objective else [])
        for row in rows:
            unknown = set(row.coeffs) - declared
            if unknown:
                raise ValueError(f"undeclared variables {sorted(unknown)}")

    def with_constraints(self, *extra: Constraint, objective: Objective | None = None) -> "LinearProgram":
        return LinearProgram(self.variables, self.constraints + tuple(extra), objective or self.objective)

    def scaled(self, factor: Fraction) -> "LinearProgram":
        if factor <= 0:
            raise ValueError("scaling factor must be positive")
        return LinearProgram(
            self.variables,
            tuple(
                Constraint({v: c * factor for v, c in k.coeffs.items()}, k.relation, k.rhs * factor, k.name)
                for k in self.constraints
            ),
            self.objective,
        )


class Verdict(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpOutcome:
    verdict: Verdict
    point: Mapping[str, Fraction] | None = None
    value: Fraction | None = None

    @property
    def feasible(self) -> bool:
        return self.verdict is not Verdict.INFEASIBLE


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows
        self.basis = basis

    def pivot(self, r: int, j: int, cost: list[Fraction]) -> None:
        row = self.rows[r]
        p = row[j]
        if p != 1:
            row[:] = [x / p if x else x for x in row]
        # frequency LPs are sparse; only touch the pivot row's support
        support = [i for i, x in enumerate(row) if x]
        for other in self.rows + [cost]:
            if other is row:
                continue
            f = other[j]
            if f:
                for i in support:
                    other[i] -= f * row[i]
        self.basis[r] = j

    def reduce_cost(self, c: Sequence[Fraction]) -> list[Fraction]:
        cost = list(c) + [Fraction(0)]
        for r, b in enumerate(self.basis):
            f = cost[b]
            if f:
                for i, x in enumerate(self.rows[r]):
                    if x:
                        cost[i] -= f * x
        return cost

    def run(self, cost: list[Fraction], ncols: int) -> bool:
        """Minimize with Bland's rule; False if unbounded."""
        while True:
            entering = next((j for j in range(ncols) if cost[j] < 0), None)
            if entering is None:
                return True
            best = None
            for r, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (row[-1] / a, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return False
            self.pivot(best[1], entering, cost)


def solve(lp: LinearProgram) -> LpOutcome:
    """Exact optimum (or infeasible / unbounded verdict) of ``lp``."""
    n = len(lp.variables)
    index = {v: i for i, v in enumerate(lp.variables)}
    raw: list[tuple[list[Fraction], str, Fraction]] = []
    for k in lp.constraints:
        if k.is_domain:
            continue
        row = [Fraction(0)] * n
        for v, c in k.coeffs.items():
            row[index[v]] += Fraction(c)
        rel, rhs = k.relation, Fraction(k.rhs)
        if not any(row):
            if not Constraint({}, rel, rhs).holds({}):
                return LpOutcome(Verdict.INFEASIBLE)
            continue
        if rhs < 0:
            row, rel, rhs = [-x for x in row], _FLIP[rel], -rhs
        raw.append((row, rel, rhs))

    m = len(raw)
    n_slack = sum(1 for _, rel, _ in raw if rel != EQ)
    n_art = sum(1 for _, rel, _ in raw if rel != LE)
    art_start = n + n_slack
    width = art_start + n_art
    rows, basis = [], []
    s_col, a_col = n, art_start
    for row, rel, rhs in raw:
        full = row + [Fraction(0)] * (width - n) + [rhs]
        if rel == LE:
            full[s_col] = Fraction(1)
            basis.append(s_col)
            s_col += 1
        else:
            if rel == GE:
                full[s_col] = Fraction(-1)
                s_col += 1
            full[a_col] = Fraction(1)
            basis.append(a_col)
            a_col += 1
        rows.append(full)
    tab = _Tableau(rows, basis)

    if n_art:
        phase1 = [Fraction(0)] * art_start + [Fraction(1)] * n_art
        cost = tab.reduce_cost(phase1)
        tab.run(cost, width)
        if cost[-1] != 0:
            return LpOutcome(Verdict.INFEASIBLE)
        # drive zero-level artificials out of the basis, dropping redundant rows
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= art_start:
                j = next((j for j in range(art_start) if tab.rows[r][j] != 0), None)
                if j is None:
                    del tab.rows[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, j, [Fraction(0)] * (width + 1))
            r += 1
        tab.rows = [row[:art_start] + [row[-1]] for row in tab.rows]

    c = [Fraction(0)] * art_start
    sign = 1
    if lp.objective is not None:
        sign = -1 if lp.objective.sense == "max" else 1
        for v, coef in lp.objective.coeffs.items():
            c[index[v]] += sign * Fraction(coef)
    cost = tab.reduce_cost(c)
    if not tab.run(cost, art_start):
        return LpOutcome(Verdict.UNBOUNDED)

    x = [Fraction(0)] * art_start
    for r, b in enumerate(tab.basis):
        x[b] = tab.rows[r][-1]
    point = {v: x[i] for i, v in enumerate(lp.variables)}
    value = Fraction(0)
    if lp.objective is not None:
        value = sum((Fraction(coef) * point[v] for v, coef in lp.objective.coeffs.items()), Fraction(0))
    return LpOutcome(Verdict.OPTIMAL, point, value)


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    witness: Mapping[str, Fraction] | None = None

    def __bool__(self) -> bool:
        return self.feasible


def check_feasible(lp: LinearProgram, positive: str) -> Feasibility:
    """Decide whether ``lp`` has a solution with ``positive`` strictly above 0.

    The strict inequality is decided by maximizing the variable (capped at 1
    so the problem stays bounded) and comparing the optimum with zero.
    """
    if positive not in lp.variables:
        raise ValueError(f"unknown variable {positive!r}")
    probe = lp.with_constraints(
        Constraint({positive: Fraction(1)}, LE, Fraction(1), f"cap[{positive}]"),
        objective=Objective("max", {positive: Fraction(1)}),
    )
    out = solve(probe)
    if out.verdict is Verdict.OPTIMAL and out.value > 0:
        return Feasibility(True, out.point)
    return Feasibility(False)


@dataclass(frozen=True)
class PointCheck:
    ok: bool
    residuals: Mapping[str, Fraction]
    violated: tuple[str, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.ok


def verify_point(lp: LinearProgram, point: Mapping[str, Fraction]) -> PointCheck:
    """Check every constraint exactly; residuals are ``lhs - rhs`` per row name."""
    missing = [v for v in lp.variables if v not in point]
    if missing:
        raise ValueError(f"point misses variables {missing}")
    residuals: dict[str, Fraction] = {}
    violated: list[str] = []
    for i, k in enumerate(lp.constraints):
        name = k.name or f"c{i}"
        residuals[name] = k.lhs(point) - k.rhs
        if not k.holds(point):
            violated.append(name)
    for v in lp.variables:
        if point[v] < 0:
            violated.append(f"{v} >= 0")
    return PointCheck(not violated, residuals, tuple(violated))
