"""Slow, independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
from fractions import Fraction

from genmp.lp import EQ, GE, LE, LinearProgram


# -- linear algebra ---------------------------------------------------------------


def gauss(matrix, rhs):
    """Solve a square system by plain Gauss-Jordan elimination; None if singular."""
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[-1] for row in a]


def independent_rows(rows, rhs):
    """Drop linearly dependent rows; None if the system is inconsistent."""
    kept, kept_rhs, basis = [], [], []  # basis: reduced rows with pivot columns
    for row, b in zip(rows, rhs):
        v = [Fraction(x) for x in row] + [Fraction(b)]
        for piv, brow in basis:
            if v[piv] != 0:
                f = v[piv]
                v = [x - f * y for x, y in zip(v, brow)]
        piv = next((i for i, x in enumerate(v[:-1]) if x != 0), None)
        if piv is None:
            if v[-1] != 0:
                return None
            continue
        p = v[piv]
        basis.append((piv, [x / p for x in v]))
        kept.append(row)
        kept_rhs.append(b)
    return kept, kept_rhs


# -- linear programming ------------------------------------------------------------


def vertex_optimum(lp: LinearProgram):
    """Optimum of a bounded LP by enumerating basic feasible solutions.

    Returns ``None`` when the LP is infeasible, else the optimal value (0
    for a feasibility problem).  Only valid for LPs whose feasible region
    is bounded in the objective direction.
    """
    n = len(lp.variables)
    index = {v: i for i, v in enumerate(lp.variables)}
    rows, rhs = [], []
    general = [k for k in lp.constraints if not k.is_domain]
    n_slack = sum(1 for k in general if k.relation != EQ)
    width = n + n_slack
    s = n
    for k in general:
        row = [Fraction(0)] * width
        for v, c in k.coeffs.items():
            row[index[v]] += Fraction(c)
        if k.relation == LE:
            row[s] = Fraction(1)
            s += 1
        elif k.relation == GE:
            row[s] = Fraction(-1)
            s += 1
        rows.append(row)
        rhs.append(Fraction(k.rhs))
    reduced = independent_rows(rows, rhs)
    if reduced is None:
        return None
    rows, rhs = reduced
    m = len(rows)
    c = [Fraction(0)] * width
    sign = 1
    if lp.objective is not None:
        sign = -1 if lp.objective.sense == "max" else 1
        for v, coef in lp.objective.coeffs.items():
            c[index[v]] += sign * Fraction(coef)
    best = None
    for cols in itertools.combinations(range(width), m):
        sol = gauss([[row[j] for j in cols] for row in rows], rhs)
        if sol is None or any(x < 0 for x in sol):
            continue
        value = sum((c[j] * x for j, x in zip(cols, sol)), Fraction(0))
        if best is None or value < best:
            best = value
    if best is None:
        return None
    return sign * best


def dual_value(lp: LinearProgram):
    """Optimum of the dual of ``min c.x, rows >=, x >= 0`` (all rows turned into >=)."""
    from genmp.lp import Constraint, Objective, solve

    assert lp.objective is not None and lp.objective.sense == "min"
    general = [k for k in lp.constraints if not k.is_domain]
    ge_rows = []
    for k in general:
        if k.relation in (GE, EQ):
            ge_rows.append((dict(k.coeffs), Fraction(k.rhs)))
        if k.relation in (LE, EQ):
            ge_rows.append(({v: -c for v, c in k.coeffs.items()}, -Fraction(k.rhs)))
    ys = [f"y{i}" for i in range(len(ge_rows))]
    cons = []
    for v in lp.variables:
        coeffs = {y: Fraction(row.get(v, 0)) for y, (row, _) in zip(ys, ge_rows) if row.get(v, 0)}
        cons.append(Constraint(coeffs, LE, Fraction(lp.objective.coeffs.get(v, 0)), f"dual[{v}]"))
    obj = Objective("max", {y: b for y, (_, b) in zip(ys, ge_rows) if b})
    return solve(LinearProgram(tuple(ys), tuple(cons), obj))


# -- end-components ----------------------------------------------------------------


def _strongly_connected(vertices, succ) -> bool:
    vertices = set(vertices)
    if not vertices:
        return False
    start = next(iter(vertices))

    def reach(adj):
        seen, stack = {start}, [start]
        while stack:
            u = stack.pop()
            for w in adj.get(u, ()):
                if w in vertices and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    rev = {}
    for u, ws in succ.items():
        for w in ws:
            rev.setdefault(w, set()).add(u)
    return reach(succ) == vertices and reach(rev) == vertices


def cone_support(m, r, region):
    """Pairs inside ``region`` usable by some balanced, reward-nonnegative flow.

    The flows form a cone (no normalization), so a pair is usable iff a
    flow with that pair at least 1 exists.
    """
    from genmp.lp import Constraint, solve

    region = set(region)
    pairs = [(s, a) for s in m.states if s in region for a in m.enabled[s] if set(m.transitions[(s, a)]) <= region]
    var = {p: f"y[{p[0]},{p[1]}]" for p in pairs}
    cons = []
    for t in region:
        coeffs = {}
        for (s, a) in pairs:
            if s == t:
                coeffs[var[(s, a)]] = coeffs.get(var[(s, a)], Fraction(0)) + 1
            p = m.transitions[(s, a)].get(t, 0)
            if p:
                coeffs[var[(s, a)]] = coeffs.get(var[(s, a)], Fraction(0)) - p
        cons.append(Constraint({k: c for k, c in coeffs.items() if c}, EQ, Fraction(0)))
    for j in range(r.dim):
        cons.append(Constraint({var[p]: r.component(p[0], j) for p in pairs if r.component(p[0], j)}, GE, Fraction(0)))
    support = []
    for p in pairs:
        lp = LinearProgram(tuple(var.values()), tuple(cons) + (Constraint({var[p]: Fraction(1)}, GE, Fraction(1)),))
        if solve(lp).feasible:
            support.append(p)
    return support


def winning_ecs_bruteforce(m, r):
    """Maximal sets U whose usable flow support covers U and is strongly connected."""
    states = list(m.states)
    good = []
    for size in range(1, len(states) + 1):
        for subset in itertools.combinations(states, size):
            support = cone_support(m, r, subset)
            succ = {}
            for s, a in support:
                succ.setdefault(s, set()).update(m.transitions[(s, a)])
            if set(succ) == set(subset) and _strongly_connected(subset, succ):
                good.append(frozenset(subset))
    return {u for u in good if not any(u < v for v in good)}


def end_components_bruteforce(m):
    """Every state set that carries some end-component."""
    out = []
    states = list(m.states)
    for size in range(1, len(states) + 1):
        for subset in itertools.combinations(states, size):
            region = set(subset)
            # largest action set that stays inside, then prune states without actions
            alive = set(region)
            while True:
                succ = {
                    s: {t for a in m.enabled[s] if set(m.transitions[(s, a)]) <= alive for t in m.transitions[(s, a)]}
                    for s in alive
                }
                nxt = {s for s in alive if succ[s]}
                if nxt == alive:
                    break
                alive = nxt
            if alive == region and _strongly_connected(region, succ):
                out.append(frozenset(region))
    return out
