import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import end_components_bruteforce

from genmp import generators
from genmp.game import Owner, validate_game
from genmp.graphs import (
    DirectedGraph,
    SubgameError,
    is_end_component,
    mec_decomposition,
    positive_attractor,
    restrict_subgame,
    sccs,
    subgame_violation,
)

seeds = st.integers(0, 10_000)


def test_sccs_sink_first():
    g = DirectedGraph(("a", "b", "c", "d"), {"a": ["b"], "b": ["a", "c"], "c": ["d"], "d": ["c"]})
    assert sccs(g) == [frozenset("cd"), frozenset("ab")]


def test_graph_rejects_dangling_edges():
    with pytest.raises(ValueError):
        DirectedGraph(("a",), {"a": ["z"]})


def test_deep_chain_does_not_recurse():
    n = 5000
    g = DirectedGraph(tuple(range(n)), {i: [i + 1] for i in range(n - 1)})
    assert len(sccs(g)) == n


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_sccs_partition_in_reverse_topological_order(seed):
    g = validate_game(generators.random_game(seed, max_states=6)).game
    comps = sccs(DirectedGraph(g.states, g.edges()))
    assert sorted(s for c in comps for s in c) == sorted(g.states)
    where = {s: i for i, c in enumerate(comps) for s in c}
    for s, succ in g.edges().items():
        for t in succ:
            assert where[t] <= where[s]


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_mecs_are_the_maximal_end_components(seed):
    m = validate_game(generators.random_game(seed, max_states=6, mdp=True)).game
    mecs = [ec.states for ec in mec_decomposition(m)]
    all_ecs = end_components_bruteforce(m)
    maximal = {u for u in all_ecs if not any(u < v for v in all_ecs)}
    assert set(mecs) == maximal
    assert all(is_end_component(m, u) for u in mecs)


def test_fig_not_connected_is_one_mec():
    m = validate_game(generators.fig_not_connected()).game
    (mec,) = mec_decomposition(m)
    assert mec.states == frozenset({"s1", "s2", "s3"})
    assert mec.actions["s1"] == ("stay", "right")


@settings(max_examples=200, deadline=None)
@given(seeds, st.data())
def test_attractor_monotone_and_idempotent(seed, data):
    g = validate_game(generators.random_game(seed, max_states=6)).game
    small = frozenset(data.draw(st.sets(st.sampled_from(g.states))))
    big = small | frozenset(data.draw(st.sets(st.sampled_from(g.states))))
    attr_small, witness = positive_attractor(g, small)
    attr_big, _ = positive_attractor(g, big)
    assert small <= attr_small <= attr_big
    assert positive_attractor(g, attr_small)[0] == attr_small
    # Min's witness moves into the attractor with positive probability
    for s, a in witness.items():
        assert g.owner[s] is Owner.MIN and g.support(s, a) & attr_small


@settings(max_examples=200, deadline=None)
@given(seeds, st.data())
def test_attractor_complement_is_a_max_subgame(seed, data):
    g = validate_game(generators.random_game(seed, max_states=6)).game
    target = frozenset(data.draw(st.sets(st.sampled_from(g.states))))
    attr, _ = positive_attractor(g, target)
    rest = frozenset(g.states) - attr
    assert subgame_violation(g, rest) is None
    sub = restrict_subgame(g, rest)
    assert set(sub.states) == rest
    for s in sub.states:
        for a in sub.enabled[s]:
            assert sub.support(s, a) <= rest


def test_restrict_subgame_rejects_leaks():
    g = validate_game(generators.exponential(1)).game
    # Min at s_1 can go to s_1^R
    with pytest.raises(SubgameError, match="min state s_1"):
        restrict_subgame(g, {"s_0", "s_1", "s_1^L"})


def test_restrict_to_empty_region():
    g = validate_game(generators.exponential(1)).game
    sub = restrict_subgame(g, set())
    assert sub.states == () and sub.initial is None
