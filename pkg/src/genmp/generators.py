"""Game-file generators: two small MDPs, the exponential-memory family, random games.

Generators return decoded game documents (plain dicts in the file schema);
:func:`genmp.io.dump_document` renders them.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Any

from .game import TransducerStrategy

Document = dict[str, Any]

FIG_FREQUENCY_STRATEGY = {"s1": {"go_s2": Fraction(1, 8), "go_branch": Fraction(7, 8)}}


def _state(sid: str, owner: str, reward, transitions: dict[str, list[tuple[str, str]]]) -> dict[str, Any]:
    return {
        "id": sid,
        "owner": owner,
        "reward": [str(Fraction(v)) for v in reward],
        "transitions": {a: [[t, p] for t, p in entries] for a, entries in transitions.items()},
    }


def fig_frequency() -> Document:
    """Four-state MDP whose frequency LP needs a randomized choice at s1."""
    return {
        "name": "fig-frequency",
        "dimensions": 2,
        "actions": ["go_s2", "go_branch", "return"],
        "states": [
            _state("s1", "max", (0, 0), {"go_s2": [("s2", "1")], "go_branch": [("s3", "1/2"), ("s4", "1/2")]}),
            _state("s2", "max", (-3, 4), {"return": [("s1", "1")]}),
            _state("s3", "max", (-2, 1), {"return": [("s1", "1")]}),
            _state("s4", "max", (3, -2), {"return": [("s1", "1")]}),
        ],
        "initial": "s1",
    }


def fig_not_connected() -> Document:
    """Three-state MDP where only a disconnected union of end-components balances."""
    return {
        "name": "fig-not-connected",
        "dimensions": 2,
        "actions": ["stay", "left", "right"],
        "states": [
            _state("s1", "max", (-1, 1), {"stay": [("s1", "1")], "right": [("s2", "1")]}),
            _state("s2", "max", (-1, -1), {"left": [("s1", "1")], "right": [("s3", "1")]}),
            _state("s3", "max", (1, -1), {"left": [("s2", "1")], "stay": [("s3", "1")]}),
        ],
        "initial": "s1",
    }


def exponential(k: int) -> Document:
    """The game where Max must remember Min's last ``k`` binary choices.

    Min owns gadgets ``s_i -> s_i^L | s_i^R``, Max owns ``t_i -> t_i^L | t_i^R``.
    Dimensions ``2i-1, 2i`` get -1 at ``s_i^L, s_i^R`` and +1 at ``t_i^L, t_i^R``.
    """
    if not isinstance(k, int) or k < 1:
        raise ValueError("k must be a positive integer")
    dims = 2 * k

    def reward(index: int | None, value: int) -> list[int]:
        vec = [0] * dims
        if index is not None:
            vec[index] = value
        return vec

    states = []

    def chain(prefix: str, owner: str, value: int, entry: str, exit_: str) -> None:
        states.append(_state(entry, owner, reward(None, 0), {"L": [(f"{prefix}_1", "1")]}))
        for i in range(1, k + 1):
            nxt = f"{prefix}_{i + 1}" if i < k else exit_
            states.append(
                _state(
                    f"{prefix}_{i}",
                    owner,
                    reward(None, 0),
                    {"L": [(f"{prefix}_{i}^L", "1")], "R": [(f"{prefix}_{i}^R", "1")]},
                )
            )
            states.append(_state(f"{prefix}_{i}^L", owner, reward(2 * i - 2, value), {"L": [(nxt, "1")]}))
            states.append(_state(f"{prefix}_{i}^R", owner, reward(2 * i - 1, value), {"L": [(nxt, "1")]}))

    chain("s", "min", -1, "s_0", "t_0")
    chain("t", "max", 1, "t_0", "s_0")
    # s_0 belongs to Max and t_0 to Min; both have a single move
    states[0]["owner"] = "max"
    states[3 * k + 1]["owner"] = "min"
    return {
        "name": f"exponential-{k}",
        "dimensions": dims,
        "actions": ["L", "R"],
        "states": states,
        "initial": "s_0",
    }


def copy_strategy(k: int) -> TransducerStrategy:
    """Max's copying strategy for :func:`exponential`, with ``2**k`` memory values.

    The memory is a word of k letters whose head is the next letter to
    play.  Min's choice at ``s_i`` is pushed at the back, and each ``t_i``
    gadget rotates the word, so ``t_i`` always reads Min's i-th choice.
    """
    memory = tuple("".join(w) for w in itertools.product("LR", repeat=k))
    ids = [st["id"] for st in exponential(k)["states"]]
    update = {}
    for m in memory:
        for s in ids:
            if s.startswith("s_") and s[-2:] in ("^L", "^R"):
                update[(m, s)] = m[1:] + s[-1]
            elif s.startswith("t_") and s[-2:] in ("^L", "^R"):
                update[(m, s)] = m[1:] + m[0]
            else:
                update[(m, s)] = m
    return TransducerStrategy(memory, memory[0], update, {m: {m[0]: Fraction(1)} for m in memory})


PROBABILITY_SPLITS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))


def random_game(
    seed: int,
    max_states: int = 5,
    max_actions: int = 2,
    max_dims: int = 2,
    mdp: bool = False,
    reward_range: int = 2,
) -> Document:
    """A seeded random game; probabilities come from {1/4, 1/2, 3/4, 1}."""
    if max_states < 1 or max_actions < 1 or max_dims < 1:
        raise ValueError("sizes must be positive")
    rng = random.Random(seed)
    n = rng.randint(1, max_states)
    dims = rng.randint(1, max_dims)
    actions = [chr(ord("a") + i) for i in range(max_actions)]
    ids = [f"q{i}" for i in range(n)]
    states = []
    for sid in ids:
        owner = "max" if mdp else rng.choice(["max", "min"])
        reward = [rng.randint(-reward_range, reward_range) for _ in range(dims)]
        n_act = rng.randint(1, max_actions)
        trans = {}
        for a in actions[:n_act]:
            if n >= 2 and rng.random() < 0.5:
                t1, t2 = rng.sample(ids, 2)
                p = rng.choice(PROBABILITY_SPLITS)
                trans[a] = [(t1, str(p)), (t2, str(1 - p))]
            else:
                trans[a] = [(rng.choice(ids), "1")]
        states.append(_state(sid, owner, reward, trans))
    return {
        "name": f"random-{seed}",
        "dimensions": dims,
        "actions": actions,
        "states": states,
        "initial": ids[0],
    }
