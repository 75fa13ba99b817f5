"""Seeded Monte Carlo runs, for demonstration only.

Sampling is exact: a distribution with common denominator ``q`` is sampled
with ``randrange(q)``, so a seed determines the trajectory on every platform.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Any, Mapping

from .game import GameInstance, Owner, StrategyError


def _sample(rng: random.Random, dist: Mapping[str, Fraction]) -> str:
    q = lcm(*(p.denominator for p in dist.values()))
    u = rng.randrange(q)
    acc = 0
    for key, p in dist.items():
        acc += p.numerator * (q // p.denominator)
        if u < acc:
            return key
    raise AssertionError("distribution does not sum to 1")


@dataclass(frozen=True)
class SimulationResult:
    steps: int
    seed: int
    average: tuple[Fraction, ...]
    trajectory_tail: tuple[str, ...]


class _Player:
    def __init__(self, spec: Mapping[str, Any] | None):
        self.spec = spec or {}
        t = self.spec.get("transducer")
        self.memory = t["initial"] if t else None

    def choose(self, rng: random.Random, state: str, enabled: tuple[str, ...], actions: tuple[str, ...]) -> str:
        t = self.spec.get("transducer")
        if t is not None:
            try:
                self.memory = t["update"][self.memory][state]
                dist = t["next"][self.memory]
            except KeyError:
                raise StrategyError(f"transducer undefined at memory {self.memory}, state {state}") from None
        else:
            dist = self.spec.get("choices", {}).get(state)
            if dist is None:
                if len(enabled) == 1:
                    return enabled[0]
                raise StrategyError(f"strategy undefined at visited state {state}")
        action = _sample(rng, dist)
        # undeclared actions of the game behave like the first declared one
        if action not in actions:
            raise StrategyError(f"unknown action {action} at {state}")
        return action

    def observe(self, state: str) -> None:
        t = self.spec.get("transducer")
        if t is not None:
            try:
                self.memory = t["update"][self.memory][state]
            except KeyError:
                raise StrategyError(f"transducer undefined at memory {self.memory}, state {state}") from None


def simulate(
    inst: GameInstance,
    strategies: Mapping[Owner, Mapping[str, Any]],
    steps: int,
    seed: int,
    start: str | None = None,
) -> SimulationResult:
    """Play ``steps`` steps and return the running average of the rewards."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    g, r = inst.game, inst.rewards
    rng = random.Random(seed)
    players = {p: _Player(strategies.get(p)) for p in Owner}
    state = start or g.initial
    total = [Fraction(0)] * r.dim
    tail: list[str] = []
    for _ in range(steps):
        for j, v in enumerate(r(state)):
            total[j] += v
        tail.append(state)
        if len(tail) > 20:
            tail.pop(0)
        mover = g.owner[state]
        for p in Owner:
            # transducers observe every state, not only their own
            if p is not mover:
                players[p].observe(state)
        action = players[mover].choose(rng, state, g.enabled[state], g.actions)
        state = _sample(rng, g.transitions[(state, action)])
    return SimulationResult(steps, seed, tuple(t / steps for t in total), tuple(tail))
