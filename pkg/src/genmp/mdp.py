"""Generalized mean-payoff MDPs.

The controller maximizes the probability that the long-run average reward
is nonnegative in every dimension.  Values are maximal reachability
probabilities to *winning* end-components, and what counts as winning
depends on the memory the controller is allowed:

* finite memory: an end-component carrying a strongly connected flow of
  positive frequencies with nonnegative average reward,
* infinite memory, liminf: a maximal end-component containing any feasible
  frequency flow (sub-components may be linked with vanishing frequency),
* infinite memory, limsup: a maximal end-component with a feasible flow for
  each dimension separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .game import Owner, RewardFunction, StochasticGame
from .graphs import DirectedGraph, actions_within, can_reach, mec_decomposition, sccs
from .lp import EQ, GE, Constraint, LinearProgram, Objective, check_feasible, solve

ValueVector = dict[str, Fraction]


def freq_var(state: str, action: str) -> str:
    return f"f[{state},{action}]"


def _require_max(m: StochasticGame) -> None:
    if m.controller is not Owner.MAX:
        raise ValueError("expected a Max-controlled MDP")


def _ordered(m: StochasticGame, region: Iterable[str]) -> list[str]:
    region = set(region)
    return [s for s in m.states if s in region]


def region_pairs(m: StochasticGame, region: Iterable[str]) -> list[tuple[str, str]]:
    region = frozenset(region)
    return [(s, a) for s in _ordered(m, region) for a in actions_within(m, s, region)]


def _region_lp(
    m: StochasticGame, r: RewardFunction, region: Iterable[str], dims: Sequence[int] | None = None
) -> tuple[LinearProgram, list[tuple[str, str]]]:
    region = frozenset(region)
    order = _ordered(m, region)
    pairs = region_pairs(m, region)
    dims = range(r.dim) if dims is None else dims

    flow: dict[str, dict[str, Fraction]] = {s: {} for s in order}
    for s, a in pairs:
        v = freq_var(s, a)
        flow[s][v] = flow[s].get(v, Fraction(0)) + 1
        for t, p in m.transitions[(s, a)].items():
            flow[t][v] = flow[t].get(v, Fraction(0)) - p
    rows = [
        Constraint({v: c for v, c in flow[s].items() if c}, EQ, Fraction(0), f"flow[{s}]") for s in order
    ]
    for j in dims:
        coeffs = {freq_var(s, a): r.component(s, j) for s, a in pairs if r.component(s, j)}
        rows.append(Constraint(coeffs, GE, Fraction(0), f"reward[{j + 1}]"))
    rows.append(Constraint({freq_var(s, a): Fraction(1) for s, a in pairs}, EQ, Fraction(1), "normalize"))
    rows.extend(Constraint({freq_var(s, a): Fraction(1)}, GE, Fraction(0), f"nonneg[{s},{a}]") for s, a in pairs)
    return LinearProgram(tuple(freq_var(s, a) for s, a in pairs), tuple(rows)), pairs


def frequency_lp(
    m: StochasticGame, r: RewardFunction, restrict: Iterable[str] | None = None
) -> LinearProgram:
    """Flow balance, nonnegative mean reward, normalization and nonnegativity.

    One variable per declared (state, action) pair of the region whose
    support stays in the region.  Rows are named ``flow[s]``,
    ``reward[j]`` (1-based), ``normalize`` and ``nonneg[s,a]``.
    """
    if restrict is None:
        region = frozenset(m.states)
    else:
        region = frozenset(restrict)
        unknown = region - set(m.states)
        if unknown:
            raise ValueError(f"unknown states {sorted(unknown)}")
        open_states = [s for s in _ordered(m, region) if not actions_within(m, s, region)]
        if open_states:
            raise ValueError(f"restriction not closed at {open_states[0]}")
    return _region_lp(m, r, region)[0]


@dataclass(frozen=True)
class FrequencySolution:
    freqs: Mapping[tuple[str, str], Fraction]

    @classmethod
    def from_point(cls, point: Mapping[str, Fraction], pairs: Iterable[tuple[str, str]]) -> "FrequencySolution":
        return cls({(s, a): point[freq_var(s, a)] for s, a in pairs})

    def state_freq(self) -> dict[str, Fraction]:
        out: dict[str, Fraction] = {}
        for (s, _), f in self.freqs.items():
            out[s] = out.get(s, Fraction(0)) + f
        return out

    def conditional(self) -> dict[str, dict[str, Fraction]]:
        """Action frequencies conditioned on the state, where the state has frequency."""
        fs = self.state_freq()
        out: dict[str, dict[str, Fraction]] = {}
        for (s, a), f in self.freqs.items():
            if f > 0:
                out.setdefault(s, {})[a] = f / fs[s]
        return out

    def as_point(self) -> dict[str, Fraction]:
        return {freq_var(s, a): f for (s, a), f in self.freqs.items()}


def _positive_flows(
    m: StochasticGame, r: RewardFunction, region: frozenset[str]
) -> tuple[dict[tuple[str, str], int], list[dict[str, Fraction]], list[tuple[str, str]]]:
    """Pairs that some solution of the region's LP uses with positive frequency.

    Returns ``{pair: index of a witness}``, the witnesses, and all pairs.
    A witness found for one pair also certifies every pair it is positive
    on, which saves most of the queries.
    """
    lp, pairs = _region_lp(m, r, region)
    positive: dict[tuple[str, str], int] = {}
    witnesses: list[dict[str, Fraction]] = []
    for pair in pairs:
        if pair in positive:
            continue
        res = check_feasible(lp, freq_var(*pair))
        if not res:
            continue
        witnesses.append(dict(res.witness))
        for q in pairs:
            if q not in positive and res.witness[freq_var(*q)] > 0:
                positive[q] = len(witnesses) - 1
    return positive, witnesses, pairs


def winning_ecs_with_flows(m: StochasticGame, r: RewardFunction) -> list[tuple[frozenset[str], FrequencySolution]]:
    """Maximal finite-memory winning end-components with a jointly positive flow each.

    Builds the graph of edges usable with positive frequency; a strongly
    connected graph is a winning end-component, otherwise each SCC is
    searched again with the LP restricted to it.
    """
    found: list[tuple[frozenset[str], FrequencySolution]] = []

    def search(region: frozenset[str]) -> None:
        positive, witnesses, pairs = _positive_flows(m, r, region)
        if not positive:
            return
        succ: dict[str, set[str]] = {}
        for s, a in positive:
            succ.setdefault(s, set()).update(m.transitions[(s, a)])
        vertices = tuple(_ordered(m, succ))
        comps = sccs(DirectedGraph(vertices, succ))
        if len(comps) == 1:
            n = len(witnesses)
            avg = {v: sum((w[v] for w in witnesses), Fraction(0)) / n for v in witnesses[0]}
            found.append((comps[0], FrequencySolution.from_point(avg, pairs)))
            return
        for comp in comps:
            search(comp)

    search(frozenset(m.states))
    position = {s: i for i, s in enumerate(m.states)}
    found.sort(key=lambda item: min(position[s] for s in item[0]))
    return found


def winning_ecs_finite(m: StochasticGame, r: RewardFunction) -> list[frozenset[str]]:
    return [ec for ec, _ in winning_ecs_with_flows(m, r)]


def region_feasible(m: StochasticGame, r: RewardFunction, region: Iterable[str], dims: Sequence[int] | None = None) -> bool:
    return solve(_region_lp(m, r, frozenset(region), dims)[0]).feasible


def winning_mecs_infinite(m: StochasticGame, r: RewardFunction, flavor: str = "inf") -> list[frozenset[str]]:
    if flavor not in ("inf", "sup"):
        raise ValueError(f"unknown flavor {flavor!r}")
    out = []
    for mec in mec_decomposition(m):
        if flavor == "inf":
            ok = region_feasible(m, r, mec.states)
        else:
            ok = all(region_feasible(m, r, mec.states, [j]) for j in range(r.dim))
        if ok:
            out.append(mec.states)
    return out


# -- reachability ---------------------------------------------------------------


def max_reachability(m: StochasticGame, target: Iterable[str]) -> tuple[ValueVector, dict[str, str]]:
    """Maximal probability to reach ``target`` and a memoryless strategy attaining it.

    Values are the least solution of ``x_s >= sum_t P(s,a)(t) x_t``, found as
    the minimizer of ``sum x``; states without a path to the target are
    fixed to 0 beforehand so the minimum is the reachability value.
    """
    _require_max(m)
    target = frozenset(target) & set(m.states)
    succ = m.edges()
    positive = can_reach(succ, m.states, target)
    unknown = [s for s in m.states if s in positive and s not in target]
    xv = {s: f"x[{s}]" for s in unknown}

    rows = []
    for s in unknown:
        for a in m.enabled[s]:
            coeffs = {xv[s]: Fraction(1)}
            rhs = Fraction(0)
            for t, p in m.transitions[(s, a)].items():
                if t in target:
                    rhs += p
                elif t in xv:
                    coeffs[xv[t]] = coeffs.get(xv[t], Fraction(0)) - p
            rows.append(Constraint({k: c for k, c in coeffs.items() if c}, GE, rhs, f"bellman[{s},{a}]"))
    lp = LinearProgram(tuple(xv.values()), tuple(rows), Objective("min", {v: Fraction(1) for v in xv.values()}))
    out = solve(lp)
    values = {s: Fraction(0) for s in m.states}
    values.update({s: Fraction(1) for s in target})
    if unknown:
        values.update({s: out.point[xv[s]] for s in unknown})
    return values, _progress_strategy(m, target, values)


def _progress_strategy(m: StochasticGame, target: frozenset[str], values: Mapping[str, Fraction]) -> dict[str, str]:
    """Value-attaining actions that also make progress toward the target.

    A Bellman-maximal action alone may loop forever (a self-loop attains any
    value), so actions are picked layer by layer backward from the target.
    Ties go to the first declared action.
    """

    def expect(s: str, a: str) -> Fraction:
        return sum((p * values[t] for t, p in m.transitions[(s, a)].items()), Fraction(0))

    optimal = {s: [a for a in m.enabled[s] if expect(s, a) == values[s]] for s in m.states}
    strategy: dict[str, str] = {}
    reached = set(target)
    while True:
        layer = {}
        for s in m.states:
            if s in reached or values[s] == 0:
                continue
            hit = next((a for a in optimal[s] if m.support(s, a) & reached), None)
            if hit is not None:
                layer[s] = hit
        if not layer:
            break
        strategy.update(layer)
        reached.update(layer)
    for s in m.states:
        strategy.setdefault(s, m.enabled[s][0])
    return strategy


def almost_sure_reach(m: StochasticGame, target: Iterable[str]) -> frozenset[str]:
    """States from which the controller reaches ``target`` with probability 1."""
    target = frozenset(target)
    region = frozenset(m.states)
    while True:
        succ = {s: {t for a in actions_within(m, s, region) for t in m.transitions[(s, a)]} for s in region}
        keep = frozenset(can_reach(succ, _ordered(m, region), target & region))
        if keep == region:
            return region
        region = keep


# -- values -------------------------------------------------------------------


def mdp_value_fm(m: StochasticGame, r: RewardFunction) -> ValueVector:
    _require_max(m)
    target = frozenset().union(*winning_ecs_finite(m, r))
    return max_reachability(m, target)[0]


def mdp_value_inf(m: StochasticGame, r: RewardFunction, flavor: str = "inf") -> ValueVector:
    _require_max(m)
    target = frozenset().union(*winning_mecs_infinite(m, r, flavor))
    return max_reachability(m, target)[0]


@dataclass(frozen=True)
class Synthesis:
    strategy: Mapping[str, Mapping[str, Fraction]]
    winning: tuple[frozenset[str], ...]
    values: Mapping[str, Fraction]
    # no winning end-component: the strategy is an arbitrary fixed choice
    degenerate: bool = False


def synthesize_randomized_memoryless(m: StochasticGame, r: RewardFunction) -> Synthesis:
    """A randomized memoryless strategy attaining the finite-memory value.

    Inside each winning end-component actions are played with the
    conditional frequencies of a jointly positive flow; elsewhere the
    strategy follows an optimal reachability strategy toward them.
    """
    _require_max(m)
    flows = winning_ecs_with_flows(m, r)
    target = frozenset().union(*(ec for ec, _ in flows))
    values, reach = max_reachability(m, target)
    strategy: dict[str, dict[str, Fraction]] = {s: {a: Fraction(1)} for s, a in reach.items()}
    for ec, sol in flows:
        cond = sol.conditional()
        for s in ec:
            strategy[s] = cond[s]
    return Synthesis(strategy, tuple(ec for ec, _ in flows), values, degenerate=not flows)


def almost_sure_onedim(m: StochasticGame, r: RewardFunction, j: int) -> frozenset[str]:
    """States of value 1 for the single objective in dimension ``j`` (0-based)."""
    _require_max(m)
    if not 0 <= j < r.dim:
        raise ValueError(f"dimension {j} out of range")
    target = frozenset()
    for mec in mec_decomposition(m):
        if region_feasible(m, r, mec.states, [j]):
            target |= mec.states
    return almost_sure_reach(m, target)
