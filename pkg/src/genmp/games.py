"""Two-player solvers built on the MDP core.

Min has pure memoryless optimal strategies for the objectives handled
here, so values are computed by enumerating them and solving the MDP that
remains for Max.  The enumeration is exponential in the number of Min
states with a choice, which is why it sits behind a size guard.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Iterable, Iterator, Mapping

from .game import Owner, PureStrategy, RewardFunction, StochasticGame, StrategyError, apply_min_strategy
from .graphs import positive_attractor, restrict_subgame, subgame_violation
from .mdp import ValueVector, almost_sure_onedim, mdp_value_fm, mdp_value_inf

DEFAULT_MAX_ADVERSARIES = 2**20
MAX_ADVERSARIES_ENV = "GENMP_MAX_ADVERSARIES"


class SizeGuardError(RuntimeError):
    pass


def adversary_limit() -> int:
    raw = os.environ.get(MAX_ADVERSARIES_ENV)
    return int(raw) if raw else DEFAULT_MAX_ADVERSARIES


def adversary_count(g: StochasticGame) -> int:
    count = 1
    for s in g.choice_states(Owner.MIN):
        count *= len(g.enabled[s])
    return count


def min_strategies(g: StochasticGame, limit: int | None = None) -> Iterator[dict[str, str]]:
    """Pure memoryless Min strategies in lexicographic order.

    Strategies are total on Min states (forced moves included); states are
    taken in declared order and actions in declared order.
    """
    limit = adversary_limit() if limit is None else limit
    count = adversary_count(g)
    if count > limit:
        raise SizeGuardError(f"{count} adversary strategies exceed the limit of {limit}")
    states = g.min_states
    for combo in itertools.product(*(g.enabled[s] for s in states)):
        yield dict(zip(states, combo))


def _mdp_values(kind: str, g: StochasticGame, r: RewardFunction, beta: PureStrategy) -> ValueVector:
    m = apply_min_strategy(g, beta)
    if kind == "fm":
        return mdp_value_fm(m, r)
    return mdp_value_inf(m, r, "inf")


def _evaluate(kind: str, g: StochasticGame, r: RewardFunction, betas: list[dict[str, str]], jobs: int) -> list[ValueVector]:
    work = partial(_mdp_values, kind, g, r)
    if jobs > 1 and len(betas) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(betas))) as pool:
            # map preserves input order, so the reduction stays deterministic
            return list(pool.map(work, betas, chunksize=max(1, len(betas) // (4 * jobs))))
    return [work(b) for b in betas]


@dataclass(frozen=True)
class GameVerdict:
    values: Mapping[str, Fraction]
    witnesses: Mapping[str, Mapping[str, str]]
    mode: str
    uniform_witness: Mapping[str, str] | None = None
    initial: str | None = None

    @property
    def adversary_witness(self) -> Mapping[str, str]:
        return self.witnesses[self.initial]


def _minimize(g: StochasticGame, kind: str, limit: int | None, jobs: int, r: RewardFunction) -> GameVerdict:
    betas = list(min_strategies(g, limit))
    vectors = _evaluate(kind, g, r, betas, jobs)
    values: dict[str, Fraction] = {}
    witnesses: dict[str, dict[str, str]] = {}
    for beta, vec in zip(betas, vectors):
        for s in g.states:
            if s not in values or vec[s] < values[s]:
                values[s] = vec[s]
                witnesses[s] = beta
    uniform = next((b for b, vec in zip(betas, vectors) if all(vec[s] == values[s] for s in g.states)), None)
    mode = "fm" if kind == "fm" else "inf-meaninf"
    return GameVerdict(values, witnesses, mode, uniform, g.initial)


def game_value_fm(g: StochasticGame, r: RewardFunction, *, limit: int | None = None, jobs: int = 1) -> GameVerdict:
    """Finite-memory value: the minimum over Min's pure memoryless strategies."""
    return _minimize(g, "fm", limit, jobs, r)


def game_value_inf_meaninf(g: StochasticGame, r: RewardFunction, *, limit: int | None = None, jobs: int = 1) -> GameVerdict:
    """Value of the liminf conjunction when Max may use infinite memory."""
    return _minimize(g, "inf", limit, jobs, r)


def memory_bound(g: StochasticGame) -> int:
    """Upper bound on Max's memory for finite-memory optimality.

    ``|A| ** |S_Min|`` times the MDP bound, which is 1 here because
    randomized memoryless strategies suffice in MDPs.
    """
    return len(g.actions) ** len(g.min_states)


# -- certificates ----------------------------------------------------------------


@dataclass(frozen=True)
class ConpCertificate:
    """Refutes ``value >= bound`` at ``state`` by exhibiting Min's strategy."""

    strategy: Mapping[str, str]
    bound: Fraction
    state: str
    mode: str = "fm"


@dataclass(frozen=True)
class NpCertificate:
    win: frozenset[str]


@dataclass(frozen=True)
class CheckResult:
    accepted: bool
    reason: str | None = None
    value: Fraction | None = None

    def __bool__(self) -> bool:
        return self.accepted


def _check_min_strategy(g: StochasticGame, beta: Mapping[str, str]) -> None:
    for s, a in beta.items():
        if s not in g.owner:
            raise StrategyError(f"unknown state {s} in strategy")
        if g.owner[s] is not Owner.MIN:
            raise StrategyError(f"state {s} is not a Min state")
        if a not in g.enabled[s]:
            raise StrategyError(f"action {a} is not available at {s}")
    for s in g.choice_states(Owner.MIN):
        if s not in beta:
            raise StrategyError(f"strategy undefined at Min state {s}")


def check_conp_certificate(g: StochasticGame, r: RewardFunction, cert: ConpCertificate) -> CheckResult:
    _check_min_strategy(g, cert.strategy)
    if cert.state not in g.owner:
        raise StrategyError(f"unknown state {cert.state}")
    kind = {"fm": "fm", "inf-meaninf": "inf"}.get(cert.mode)
    if kind is None:
        raise ValueError(f"unknown certificate mode {cert.mode!r}")
    value = _mdp_values(kind, g, r, cert.strategy)[cert.state]
    if value < cert.bound:
        return CheckResult(True, None, value)
    return CheckResult(False, f"value {value} at {cert.state} under the strategy is not below {cert.bound}", value)


def check_conp_certificate_fm(g: StochasticGame, r: RewardFunction, cert: ConpCertificate) -> CheckResult:
    if cert.mode != "fm":
        raise ValueError("expected a finite-memory certificate")
    return check_conp_certificate(g, r, cert)


@dataclass(frozen=True)
class ThresholdAnswer:
    holds: bool
    value: Fraction
    certificate: ConpCertificate | None = None


def value_threshold_query(
    g: StochasticGame,
    r: RewardFunction,
    state: str,
    threshold: Fraction,
    mode: str = "fm",
    *,
    limit: int | None = None,
    jobs: int = 1,
) -> ThresholdAnswer:
    """Decide ``value(state) >= threshold``; a "no" comes with a certificate."""
    threshold = Fraction(threshold)
    if not 0 <= threshold <= 1:
        raise ValueError(f"threshold {threshold} outside [0,1]")
    if state not in g.owner:
        raise ValueError(f"unknown state {state}")
    if mode == "fm":
        verdict = game_value_fm(g, r, limit=limit, jobs=jobs)
    elif mode == "inf-meaninf":
        verdict = game_value_inf_meaninf(g, r, limit=limit, jobs=jobs)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    value = verdict.values[state]
    if value >= threshold:
        return ThresholdAnswer(True, value)
    return ThresholdAnswer(False, value, ConpCertificate(dict(verdict.witnesses[state]), threshold, state, mode))


# -- almost-sure limsup ------------------------------------------------------------


def _onedim_game(g: StochasticGame, r: RewardFunction, j: int, limit: int | None) -> tuple[frozenset[str], dict[str, str]]:
    """Almost-sure set for dimension ``j`` and a Min strategy confining Max to it."""
    best: tuple[frozenset[str], dict[str, str]] | None = None
    win = frozenset(g.states)
    for beta in min_strategies(g, limit):
        got = almost_sure_onedim(apply_min_strategy(g, beta), r, j)
        win &= got
        if best is None or len(got) < len(best[0]):
            best = (got, beta)
    return win, best[1]


def almost_sure_onedim_game(g: StochasticGame, r: RewardFunction, j: int, *, limit: int | None = None) -> frozenset[str]:
    """States almost-sure winning for the limsup objective of dimension ``j`` (0-based)."""
    if not g.states:
        return frozenset()
    return _onedim_game(g, r, j, limit)[0]


@dataclass(frozen=True)
class Layer:
    """One peeling step: ``violating`` loses dimension ``dim``; ``removed`` is its attractor."""

    dim: int
    violating: frozenset[str]
    removed: frozenset[str]
    strategy: Mapping[str, str]


@dataclass(frozen=True)
class Peeling:
    win: frozenset[str]
    layers: tuple[Layer, ...] = field(default=())

    def min_strategy(self, g: StochasticGame) -> dict[str, str]:
        """Compose the layer strategies; Min states left over play their first action."""
        beta = {}
        for layer in self.layers:
            beta.update(layer.strategy)
        for s in g.min_states:
            beta.setdefault(s, g.enabled[s][0])
        return beta


def peel_meansup(g: StochasticGame, r: RewardFunction, *, limit: int | None = None) -> Peeling:
    """Remove Min's positive attractors of one-dimensional losing states until none remain.

    In each round the least dimension with a losing state is used.  What is
    left is the almost-sure winning set of the limsup conjunction.
    """
    current = frozenset(g.states)
    layers: list[Layer] = []
    while current:
        sub = restrict_subgame(g, current)
        for j in range(r.dim):
            win_j, beta_j = _onedim_game(sub, r, j, limit)
            losing = current - win_j
            if losing:
                break
        else:
            break
        removed, attract = positive_attractor(sub, losing, Owner.MIN)
        strategy = {}
        for s in sub.min_states:
            if s in losing:
                strategy[s] = beta_j.get(s, sub.enabled[s][0])
            elif s in removed:
                strategy[s] = attract[s]
        layers.append(Layer(j, losing, removed, strategy))
        current -= removed
    return Peeling(current, tuple(layers))


def almost_sure_meansup(g: StochasticGame, r: RewardFunction, *, limit: int | None = None) -> frozenset[str]:
    return peel_meansup(g, r, limit=limit).win


def check_np_certificate_assup(
    g: StochasticGame, r: RewardFunction, cert: NpCertificate | Iterable[str], *, limit: int | None = None
) -> CheckResult:
    """Accept iff the set induces a subgame where every state wins each dimension almost surely."""
    win = frozenset(cert.win if isinstance(cert, NpCertificate) else cert)
    unknown = win - set(g.states)
    if unknown:
        return CheckResult(False, f"unknown states {sorted(unknown)}")
    if not win:
        return CheckResult(True)
    reason = subgame_violation(g, win)
    if reason:
        return CheckResult(False, reason)
    sub = restrict_subgame(g, win)
    for j in range(r.dim):
        got = almost_sure_onedim_game(sub, r, j, limit=limit)
        if got != win:
            bad = next(s for s in sub.states if s not in got)
            return CheckResult(False, f"state {bad} is not almost-sure winning in dimension {j + 1}")
    return CheckResult(True)
