"""Games, MDPs, Markov chains, reward functions and strategies.

All probabilities and rewards are :class:`fractions.Fraction`.  A game stores
the actions actually declared at each state (``enabled``) next to a *total*
transition function: an undeclared action at a state behaves like the first
declared one.  Algorithms iterate over ``enabled`` so the padding never
inflates LPs or strategy enumerations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, Mapping

Distribution = Mapping[str, Fraction]
PureStrategy = Mapping[str, str]
RandomizedStrategy = Mapping[str, Distribution]


class Owner(str, Enum):
    MAX = "max"
    MIN = "min"

    @property
    def opponent(self) -> "Owner":
        return Owner.MIN if self is Owner.MAX else Owner.MAX


class GameValidationError(ValueError):
    """Raised with the full list of violated invariants."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class StrategyError(ValueError):
    pass


_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(value: Any) -> Fraction:
    """Parse an int or a ``"p/q"`` / ``"p"`` string.  Floats are refused."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        m = _RATIONAL.match(value)
        if m:
            num, den = m.group(1), m.group(2)
            if den is not None and int(den) == 0:
                raise ValueError(f"zero denominator: {value!r}")
            return Fraction(int(num), int(den) if den is not None else 1)
    raise ValueError(f"not an exact rational (use integers or 'p/q'): {value!r}")


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


@dataclass(frozen=True)
class RewardFunction:
    dim: int
    vectors: Mapping[str, tuple[Fraction, ...]]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("reward dimension must be positive")
        for s, vec in self.vectors.items():
            if len(vec) != self.dim:
                raise ValueError(f"dimension mismatch at state {s}")

    def __call__(self, state: str) -> tuple[Fraction, ...]:
        return self.vectors[state]

    def component(self, state: str, j: int) -> Fraction:
        return self.vectors[state][j]

    def lift(self, origin: Mapping[str, str]) -> "RewardFunction":
        """Rewards on a product state space, projecting each state to ``origin[state]``."""
        return RewardFunction(self.dim, {p: self.vectors[s] for p, s in origin.items()})

    def shifted(self, thresholds: Iterable[Fraction]) -> "RewardFunction":
        nu = tuple(thresholds)
        if len(nu) != self.dim:
            raise ValueError("threshold vector has the wrong dimension")
        return RewardFunction(
            self.dim, {s: tuple(v - t for v, t in zip(vec, nu)) for s, vec in self.vectors.items()}
        )

    def scaled(self, factor: Fraction) -> "RewardFunction":
        return RewardFunction(
            self.dim, {s: tuple(v * factor for v in vec) for s, vec in self.vectors.items()}
        )


@dataclass(frozen=True)
class StochasticGame:
    states: tuple[str, ...]
    owner: Mapping[str, Owner]
    actions: tuple[str, ...]
    enabled: Mapping[str, tuple[str, ...]]
    transitions: Mapping[tuple[str, str], Distribution]
    initial: str | None = None
    # product / subgame bookkeeping: state -> state of the game it was derived from
    origin: Mapping[str, str] | None = field(default=None, compare=False)

    @classmethod
    def build(
        cls,
        states: Iterable[str],
        owner: Mapping[str, Owner],
        moves: Mapping[str, Mapping[str, Distribution]],
        initial: str | None = None,
        actions: Iterable[str] | None = None,
        origin: Mapping[str, str] | None = None,
    ) -> "StochasticGame":
        """Build a game from per-state declared moves, totalizing over ``actions``."""
        states = tuple(states)
        if actions is None:
            seen: dict[str, None] = {}
            for s in states:
                for a in moves[s]:
                    seen.setdefault(a, None)
            actions = tuple(seen)
        actions = tuple(actions)
        # declaration order is kept: it decides every "first action" tie-break
        enabled = {s: tuple(a for a in moves[s] if a in actions) for s in states}
        transitions: dict[tuple[str, str], Distribution] = {}
        for s in states:
            if not enabled[s]:
                raise GameValidationError([f"state {s} has no action"])
            fallback = dict(moves[s][enabled[s][0]])
            for a in actions:
                transitions[(s, a)] = dict(moves[s][a]) if a in moves[s] else fallback
        if initial is None and states:
            initial = states[0]
        return cls(states, dict(owner), actions, enabled, transitions, initial, origin)

    # -- queries -------------------------------------------------------------

    def dist(self, state: str, action: str) -> Distribution:
        return self.transitions[(state, action)]

    def support(self, state: str, action: str) -> frozenset[str]:
        return frozenset(self.transitions[(state, action)])

    def moves(self, state: str) -> dict[str, Distribution]:
        return {a: self.transitions[(state, a)] for a in self.enabled[state]}

    def states_of(self, player: Owner) -> tuple[str, ...]:
        return tuple(s for s in self.states if self.owner[s] is player)

    @property
    def max_states(self) -> tuple[str, ...]:
        return self.states_of(Owner.MAX)

    @property
    def min_states(self) -> tuple[str, ...]:
        return self.states_of(Owner.MIN)

    def choice_states(self, player: Owner) -> tuple[str, ...]:
        """States of ``player`` with more than one declared action."""
        return tuple(s for s in self.states_of(player) if len(self.enabled[s]) > 1)

    @property
    def controller(self) -> Owner | None:
        """The player controlling this game as an MDP, or None for a proper game.

        A player whose states all have a single action has no choice, so such
        games count as MDPs of the other player.
        """
        if not self.choice_states(Owner.MIN):
            return Owner.MAX
        if not self.choice_states(Owner.MAX):
            return Owner.MIN
        return None

    @property
    def is_mdp(self) -> bool:
        return self.controller is not None

    def edges(self) -> dict[str, frozenset[str]]:
        """Underlying graph over declared actions."""
        return {
            s: frozenset(t for a in self.enabled[s] for t in self.transitions[(s, a)])
            for s in self.states
        }

    def remapped(self, state: str) -> tuple[str, ...]:
        """Actions of ``state`` whose distribution is padding (not declared)."""
        return tuple(a for a in self.actions if a not in self.enabled[state])

    def as_max_mdp(self) -> "StochasticGame":
        """Relabel choiceless Min states so that Max owns every state."""
        if self.controller is not Owner.MAX:
            raise ValueError("not a Max-controlled MDP: Min has a choice somewhere")
        return StochasticGame(
            self.states,
            {s: Owner.MAX for s in self.states},
            self.actions,
            self.enabled,
            self.transitions,
            self.initial,
            self.origin,
        )


Mdp = StochasticGame


@dataclass(frozen=True)
class MarkovChain:
    states: tuple[str, ...]
    transitions: Mapping[str, Distribution]

    def successors(self, state: str) -> frozenset[str]:
        return frozenset(self.transitions[state])


@dataclass(frozen=True)
class TransducerStrategy:
    """Finite-memory strategy.

    After observing state ``s`` in memory ``m`` the memory becomes
    ``update[(m, s)]`` and the next action is drawn from ``next_action`` of
    the *new* memory.
    """

    memory: tuple[str, ...]
    initial: str
    update: Mapping[tuple[str, str], str]
    next_action: Mapping[str, Distribution]


# -- validation --------------------------------------------------------------

_OWNER_TAGS = {"max": Owner.MAX, "min": Owner.MIN, "mdp-max": Owner.MAX, "mdp-min": Owner.MIN}


@dataclass(frozen=True)
class GameInstance:
    """A validated game file: the game, its rewards and a display name."""

    name: str
    game: StochasticGame
    rewards: RewardFunction
    mdp_tagged: bool = False


def validate_game(raw: Mapping[str, Any]) -> GameInstance:
    """Validate a decoded game description and build the game.

    Every violation found is reported at once through GameValidationError.
    """
    errors: list[str] = []
    if not isinstance(raw, Mapping):
        raise GameValidationError(["game description must be an object"])

    name = raw.get("name", "game")
    dim = raw.get("dimensions")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        errors.append("dimensions must be a positive integer")
        dim = None
    actions = raw.get("actions")
    if not isinstance(actions, list) or not all(isinstance(a, str) for a in actions):
        errors.append("actions must be a list of strings")
        actions = []
    if len(set(actions)) != len(actions):
        errors.append("duplicate action ids")

    raw_states = raw.get("states")
    if not isinstance(raw_states, list) or not raw_states:
        raise GameValidationError(errors + ["states must be a non-empty list"])

    ids: list[str] = []
    for i, st in enumerate(raw_states):
        sid = st.get("id") if isinstance(st, Mapping) else None
        if not isinstance(sid, str):
            errors.append(f"state #{i} has no string id")
            continue
        if sid in ids:
            errors.append(f"duplicate state id {sid}")
        ids.append(sid)
    known = set(ids)

    owner: dict[str, Owner] = {}
    tags: set[str] = set()
    vectors: dict[str, tuple[Fraction, ...]] = {}
    moves: dict[str, dict[str, dict[str, Fraction]]] = {}
    for st in raw_states:
        if not isinstance(st, Mapping) or not isinstance(st.get("id"), str):
            continue
        sid = st["id"]
        tag = st.get("owner")
        if tag not in _OWNER_TAGS:
            errors.append(f"owner missing or invalid at state {sid}")
        else:
            owner[sid] = _OWNER_TAGS[tag]
            tags.add(tag)

        reward = st.get("reward", [])
        if not isinstance(reward, list):
            errors.append(f"reward at state {sid} must be a list")
            reward = []
        if dim is not None and len(reward) != dim:
            errors.append(f"dimension mismatch at state {sid}: {len(reward)} rewards for {dim} dimensions")
        try:
            vectors[sid] = tuple(parse_rational(v) for v in reward)
        except ValueError as exc:
            errors.append(f"reward at state {sid}: {exc}")

        trans = st.get("transitions")
        if not isinstance(trans, Mapping) or not trans:
            errors.append(f"missing transition at state {sid}: no action declared")
            continue
        moves[sid] = {}
        for a, entries in trans.items():
            if a not in actions:
                errors.append(f"undeclared action {a} at state {sid}")
                continue
            dist: dict[str, Fraction] = {}
            ok = isinstance(entries, list) and entries
            for entry in entries if ok else []:
                if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
                    errors.append(f"malformed transition entry at ({sid},{a}): {entry!r}")
                    ok = False
                    continue
                target, prob = entry
                if target not in known:
                    errors.append(f"unknown target {target!r} at ({sid},{a})")
                    ok = False
                    continue
                if target in dist:
                    errors.append(f"duplicate target {target} at ({sid},{a})")
                    ok = False
                    continue
                try:
                    p = parse_rational(prob)
                except ValueError as exc:
                    errors.append(f"probability at ({sid},{a}): {exc}")
                    ok = False
                    continue
                if p <= 0 or p > 1:
                    errors.append(f"probability {p} out of (0,1] at ({sid},{a})")
                    ok = False
                    continue
                dist[target] = p
            if not isinstance(entries, list) or not entries:
                errors.append(f"missing transition at ({sid},{a}): empty distribution")
            elif ok and sum(dist.values()) != 1:
                errors.append(f"distribution sum {sum(dist.values())} != 1 at ({sid},{a})")
            moves[sid][a] = dist

    if tags & {"mdp-max", "mdp-min"} and len(set(owner.values())) > 1:
        errors.append("file is tagged as an MDP but both players own states")
    initial = raw.get("initial", ids[0] if ids else None)
    if initial not in known:
        errors.append(f"initial state {initial!r} is not a state")
    if not isinstance(name, str):
        errors.append("name must be a string")

    if errors:
        raise GameValidationError(errors)

    rewards = RewardFunction(dim, vectors)
    if "thresholds" in raw:
        try:
            nu = [parse_rational(v) for v in raw["thresholds"]]
            rewards = rewards.shifted(nu)
        except (ValueError, TypeError) as exc:
            raise GameValidationError([f"thresholds: {exc}"]) from None
    game = StochasticGame.build(ids, owner, moves, initial=initial, actions=actions)
    return GameInstance(name, game, rewards, mdp_tagged=bool(tags & {"mdp-max", "mdp-min"}))


def check_distribution(dist: Mapping[str, Fraction]) -> None:
    if any(p <= 0 for p in dist.values()) or sum(dist.values()) != 1:
        raise ValueError(f"not a probability distribution: {dict(dist)}")


# -- derived models ----------------------------------------------------------


def apply_min_strategy(game: StochasticGame, beta: PureStrategy) -> StochasticGame:
    """The Max-controlled MDP left after Min commits to the memoryless ``beta``."""
    enabled = dict(game.enabled)
    transitions = dict(game.transitions)
    owner = {}
    for s in game.states:
        owner[s] = Owner.MAX
        if game.owner[s] is not Owner.MIN:
            continue
        if s in beta:
            a = beta[s]
            if a not in game.enabled[s]:
                raise StrategyError(f"action {a} is not available at Min state {s}")
        elif len(game.enabled[s]) == 1:
            a = game.enabled[s][0]
        else:
            raise StrategyError(f"Min strategy undefined at state {s}")
        enabled[s] = (a,)
        chosen = game.transitions[(s, a)]
        for b in game.actions:
            transitions[(s, b)] = chosen
    return StochasticGame(
        game.states, owner, game.actions, enabled, transitions, game.initial, game.origin
    )


def _check_transducer(game: StochasticGame, sigma: TransducerStrategy) -> None:
    mem = set(sigma.memory)
    if sigma.initial not in mem:
        raise StrategyError("initial memory is not a memory value")
    for m in sigma.memory:
        if m not in sigma.next_action:
            raise StrategyError(f"next-action undefined at memory {m}")
        check_distribution(sigma.next_action[m])
        for s in game.states:
            nxt = sigma.update.get((m, s))
            if nxt not in mem:
                raise StrategyError(f"memory update undefined at ({m},{s})")


def product_state(state: str, memory: str) -> str:
    return f"{state}|{memory}"


def product_mdp(game: StochasticGame, sigma: TransducerStrategy) -> StochasticGame:
    """The Min-controlled MDP obtained by letting Max play the transducer ``sigma``.

    Product states are named ``"state|memory"``; ``origin`` maps them back to
    game states, which is what :meth:`RewardFunction.lift` needs.
    """
    _check_transducer(game, sigma)
    states = tuple(product_state(s, m) for s in game.states for m in sigma.memory)
    origin = {product_state(s, m): s for s in game.states for m in sigma.memory}
    moves: dict[str, dict[str, dict[str, Fraction]]] = {}
    for s in game.states:
        for m in sigma.memory:
            m2 = sigma.update[(m, s)]
            if game.owner[s] is Owner.MAX:
                mixed: dict[str, Fraction] = {}
                for b, pb in sigma.next_action[m2].items():
                    for t, pt in game.transitions[(s, b)].items():
                        key = product_state(t, m2)
                        mixed[key] = mixed.get(key, Fraction(0)) + pb * pt
                # Max has committed: a single move remains at this product state
                moves[product_state(s, m)] = {game.enabled[s][0]: mixed}
            else:
                moves[product_state(s, m)] = {
                    a: {product_state(t, m2): p for t, p in game.transitions[(s, a)].items()}
                    for a in game.enabled[s]
                }
    initial = product_state(game.initial, sigma.initial) if game.initial is not None else None
    return StochasticGame.build(
        states,
        {p: Owner.MIN for p in states},
        moves,
        initial=initial,
        actions=game.actions,
        origin=origin,
    )


def induced_chain(mdp: StochasticGame, strategy: RandomizedStrategy) -> MarkovChain:
    """Fix a randomized memoryless choice at every state with a choice.

    States with a single declared action need no entry in ``strategy``.
    """
    rows: dict[str, Distribution] = {}
    for s in mdp.states:
        if s in strategy:
            choice = strategy[s]
            check_distribution(choice)
        elif len(mdp.enabled[s]) == 1:
            choice = {mdp.enabled[s][0]: Fraction(1)}
        else:
            raise StrategyError(f"strategy undefined at state {s}")
        row: dict[str, Fraction] = {}
        for a, pa in choice.items():
            if a not in mdp.enabled[s]:
                raise StrategyError(f"action {a} is not available at state {s}")
            for t, pt in mdp.transitions[(s, a)].items():
                row[t] = row.get(t, Fraction(0)) + pa * pt
        rows[s] = row
    return MarkovChain(mdp.states, rows)


def pure_to_randomized(strategy: PureStrategy) -> dict[str, dict[str, Fraction]]:
    return {s: {a: Fraction(1)} for s, a in strategy.items()}
