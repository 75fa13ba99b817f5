"""SCCs, end-components, positive attractors and subgame restriction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Hashable, Iterable, Mapping

from .game import Owner, PureStrategy, StochasticGame


@dataclass(frozen=True)
class DirectedGraph:
    vertices: tuple[Hashable, ...]
    successors: Mapping[Hashable, Collection[Hashable]]

    def __post_init__(self):
        vs = set(self.vertices)
        for v in self.vertices:
            for w in self.successors.get(v, ()):
                if w not in vs:
                    raise ValueError(f"edge ({v},{w}) leaves the vertex set")


def sccs(graph: DirectedGraph) -> list[frozenset]:
    """Strongly connected components, sink components first.

    Iterative Tarjan, so recursion depth is not an issue.  Vertices are
    visited in declared order, which makes the output deterministic.
    """
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[frozenset] = []
    counter = 0

    for root in graph.vertices:
        if root in index:
            continue
        work = [(root, iter(graph.successors.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(graph.successors.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(frozenset(comp))
    return out


def reachable(successors: Mapping, sources: Iterable) -> set:
    seen = set(sources)
    todo = list(seen)
    while todo:
        v = todo.pop()
        for w in successors.get(v, ()):
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def can_reach(successors: Mapping, vertices: Iterable, target: Iterable) -> set:
    """Vertices from which some vertex of ``target`` is reachable."""
    vertices = list(vertices)
    pred: dict = {v: [] for v in vertices}
    for v in vertices:
        for w in successors.get(v, ()):
            if w in pred:
                pred[w].append(v)
    return reachable(pred, [t for t in target if t in pred])


# -- end-components -----------------------------------------------------------


@dataclass(frozen=True)
class EndComponent:
    states: frozenset[str]
    actions: Mapping[str, tuple[str, ...]]


def actions_within(game: StochasticGame, state: str, region: Collection[str]) -> tuple[str, ...]:
    """Declared actions of ``state`` whose support stays inside ``region``."""
    return tuple(a for a in game.enabled[state] if game.support(state, a) <= region)


def _inner_graph(game: StochasticGame, region: frozenset[str]) -> DirectedGraph:
    order = tuple(s for s in game.states if s in region)
    succ = {
        s: {t for a in actions_within(game, s, region) for t in game.transitions[(s, a)]}
        for s in order
    }
    return DirectedGraph(order, succ)


def is_end_component(mdp: StochasticGame, region: Iterable[str]) -> bool:
    region = frozenset(region)
    if not region or not region <= set(mdp.states):
        return False
    if any(not actions_within(mdp, s, region) for s in region):
        return False
    return len(sccs(_inner_graph(mdp, region))) == 1


def mec_decomposition(mdp: StochasticGame, region: Iterable[str] | None = None) -> list[EndComponent]:
    """Maximal end-components, by iterated SCC refinement.

    ``region`` optionally restricts the search to a subset of the states.
    Components are listed by the position of their first state.
    """
    pending = [frozenset(mdp.states if region is None else region)]
    found: list[frozenset[str]] = []
    while pending:
        current = pending.pop()
        # drop states that cannot stay inside ``current`` until stable
        while True:
            keep = frozenset(s for s in current if actions_within(mdp, s, current))
            if keep == current:
                break
            current = keep
        if not current:
            continue
        comps = sccs(_inner_graph(mdp, current))
        if len(comps) == 1:
            found.append(current)
        else:
            pending.extend(comps)
    position = {s: i for i, s in enumerate(mdp.states)}
    found.sort(key=lambda c: min(position[s] for s in c))
    return [EndComponent(c, {s: actions_within(mdp, s, c) for s in c}) for c in found]


# -- attractors and subgames --------------------------------------------------


def positive_attractor(
    game: StochasticGame, target: Iterable[str], player: Owner = Owner.MIN
) -> tuple[frozenset[str], dict[str, str]]:
    """States from which ``player`` reaches ``target`` with positive probability.

    Returns the least fixed point of ``X -> target | cpre(X)`` together with a
    memoryless witness on the player's states outside ``target``: the first
    declared action whose support meets the layer computed before it.
    """
    attr = set(target)
    witness: dict[str, str] = {}
    while True:
        layer: dict[str, str | None] = {}
        for s in game.states:
            if s in attr:
                continue
            hits = [a for a in game.enabled[s] if game.support(s, a) & attr]
            if game.owner[s] is player:
                if hits:
                    layer[s] = hits[0]
            elif len(hits) == len(game.enabled[s]):
                layer[s] = None
        if not layer:
            return frozenset(attr), witness
        for s, a in layer.items():
            if a is not None:
                witness[s] = a
        attr.update(layer)


class SubgameError(ValueError):
    pass


def subgame_violation(game: StochasticGame, region: Iterable[str], player: Owner = Owner.MAX) -> str | None:
    """Why ``region`` does not induce a subgame for ``player``, or None."""
    region = frozenset(region)
    for s in game.states:
        if s not in region:
            continue
        safe = actions_within(game, s, region)
        if game.owner[s] is player:
            if not safe:
                return f"{player.value} state {s} has no action staying inside the set"
        elif len(safe) != len(game.enabled[s]):
            leaking = [a for a in game.enabled[s] if a not in safe][0]
            return f"{game.owner[s].value} state {s} can leave the set with action {leaking}"
    return None


def restrict_subgame(game: StochasticGame, region: Iterable[str], player: Owner = Owner.MAX) -> StochasticGame:
    """The game on ``region``, which must induce a subgame for ``player``.

    Leaking actions of ``player`` are re-mapped to its first safe action, so
    the transition function stays total; they are no longer declared.
    """
    region = frozenset(region)
    reason = subgame_violation(game, region, player)
    if reason:
        raise SubgameError(reason)
    states = tuple(s for s in game.states if s in region)
    moves = {s: {a: game.transitions[(s, a)] for a in actions_within(game, s, region)} for s in states}
    initial = game.initial if game.initial in region else (states[0] if states else None)
    origin = {s: (game.origin or {}).get(s, s) for s in states} if game.origin else None
    if not states:
        return StochasticGame((), {}, game.actions, {}, {}, None, origin)
    return StochasticGame.build(
        states, {s: game.owner[s] for s in states}, moves, initial=initial, actions=game.actions, origin=origin
    )
