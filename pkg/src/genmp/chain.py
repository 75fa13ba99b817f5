"""Exact analysis of finite Markov chains."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from . import linalg
from .game import MarkovChain, RewardFunction
from .graphs import DirectedGraph, can_reach, sccs


def _graph(chain: MarkovChain) -> DirectedGraph:
    return DirectedGraph(chain.states, {s: tuple(chain.transitions[s]) for s in chain.states})


def recurrent_classes(chain: MarkovChain) -> list[frozenset[str]]:
    """Bottom SCCs: closed, strongly connected sets with no leaving edge."""
    out = []
    for comp in sccs(_graph(chain)):
        if all(chain.successors(s) <= comp for s in comp):
            out.append(comp)
    position = {s: i for i, s in enumerate(chain.states)}
    out.sort(key=lambda c: min(position[s] for s in c))
    return out


def _check_recurrent(chain: MarkovChain, cls: frozenset[str]) -> None:
    if not cls or any(not chain.successors(s) <= cls for s in cls):
        raise ValueError("not a closed set of the chain")
    sub = DirectedGraph(tuple(s for s in chain.states if s in cls), {s: tuple(chain.transitions[s]) for s in cls})
    if len(sccs(sub)) != 1:
        raise ValueError("not a recurrent class (not strongly connected)")


def stationary_distribution(chain: MarkovChain, cls: Iterable[str]) -> dict[str, Fraction]:
    cls = frozenset(cls)
    _check_recurrent(chain, cls)
    order = [s for s in chain.states if s in cls]
    idx = {s: i for i, s in enumerate(order)}
    n = len(order)
    # pi (P - I) = 0, transposed; the last balance equation is replaced by sum(pi) = 1
    a = [[Fraction(0)] * n for _ in range(n)]
    for s in order:
        for t, p in chain.transitions[s].items():
            a[idx[t]][idx[s]] += p
        a[idx[s]][idx[s]] -= 1
    a[n - 1] = [Fraction(1)] * n
    b = [Fraction(0)] * (n - 1) + [Fraction(1)]
    pi = linalg.solve(a, b)
    return dict(zip(order, pi))


def class_mean_payoff(chain: MarkovChain, cls: Iterable[str], rewards: RewardFunction) -> tuple[Fraction, ...]:
    pi = stationary_distribution(chain, cls)
    return tuple(
        sum((p * rewards.component(s, j) for s, p in pi.items()), Fraction(0)) for j in range(rewards.dim)
    )


def reach_probabilities(chain: MarkovChain, target: Iterable[str]) -> dict[str, Fraction]:
    target = frozenset(target)
    succ = {s: chain.transitions[s] for s in chain.states}
    positive = can_reach(succ, chain.states, target)
    unknown = [s for s in chain.states if s in positive and s not in target]
    idx = {s: i for i, s in enumerate(unknown)}
    n = len(unknown)
    a = [[Fraction(0)] * n for _ in range(n)]
    b = [Fraction(0)] * n
    for s in unknown:
        i = idx[s]
        a[i][i] += 1
        for t, p in chain.transitions[s].items():
            if t in target:
                b[i] += p
            elif t in idx:
                a[i][idx[t]] -= p
    x = linalg.solve(a, b)
    out = {s: Fraction(0) for s in chain.states}
    out.update({s: Fraction(1) for s in target if s in out})
    out.update(zip(unknown, x))
    return out


def satisfies_mean_payoff(payoff: Iterable[Fraction]) -> bool:
    return all(v >= 0 for v in payoff)


def objective_probability(chain: MarkovChain, rewards: RewardFunction) -> dict[str, Fraction]:
    """Probability that every dimension has nonnegative long-run average.

    In a finite chain the run ends in a recurrent class almost surely, where
    the average equals the class mean payoff; liminf and limsup agree.
    """
    good = set()
    for cls in recurrent_classes(chain):
        if satisfies_mean_payoff(class_mean_payoff(chain, cls, rewards)):
            good |= cls
    return reach_probabilities(chain, good)
