import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genmp import chain, games, generators, mdp
from genmp.game import (
    RewardFunction,
    TransducerStrategy,
    apply_min_strategy,
    induced_chain,
    product_mdp,
    pure_to_randomized,
    validate_game,
)

seeds = st.integers(0, 10_000)


def _random_game(seed, **kw):
    inst = validate_game(generators.random_game(seed, **kw))
    return inst.game, inst.rewards


@settings(max_examples=120, deadline=None)
@given(seeds)
def test_value_hierarchy(seed):
    g, r = _random_game(seed)
    fm = games.game_value_fm(g, r)
    inf = games.game_value_inf_meaninf(g, r)
    assert all(fm.values[s] <= inf.values[s] for s in g.states)
    # MeanInf implies MeanSup
    win = games.almost_sure_meansup(g, r)
    assert {s for s in g.states if inf.values[s] == 1} <= win


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_games_without_min_choices_reduce_to_mdps(seed):
    g, r = _random_game(seed, mdp=True)
    assert games.game_value_fm(g, r).values == mdp.mdp_value_fm(g, r)
    assert games.game_value_inf_meaninf(g, r).values == mdp.mdp_value_inf(g, r, "inf")


@settings(max_examples=120, deadline=None)
@given(seeds)
def test_witnesses_attain_the_value(seed):
    g, r = _random_game(seed)
    verdict = games.game_value_fm(g, r)
    for s in g.states:
        got = mdp.mdp_value_fm(apply_min_strategy(g, verdict.witnesses[s]), r)
        assert got[s] == verdict.values[s]
        assert set(verdict.witnesses[s]) == set(g.min_states)
        cert = games.ConpCertificate(verdict.witnesses[s], verdict.values[s] + F(1, 100), s)
        assert games.check_conp_certificate_fm(g, r, cert)
        assert not games.check_conp_certificate_fm(g, r, games.ConpCertificate(verdict.witnesses[s], F(0), s))
        # a certificate never refutes the exact value
        cert = games.ConpCertificate(verdict.witnesses[s], verdict.values[s], s)
        assert not games.check_conp_certificate_fm(g, r, cert)
    if verdict.uniform_witness is not None:
        got = mdp.mdp_value_fm(apply_min_strategy(g, verdict.uniform_witness), r)
        assert got == verdict.values


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from([F(1, 3), F(5)]))
def test_reward_scaling_invariance(seed, factor):
    g, r = _random_game(seed)
    assert games.game_value_fm(g, r).values == games.game_value_fm(g, r.scaled(factor)).values
    assert games.almost_sure_meansup(g, r) == games.almost_sure_meansup(g, r.scaled(factor))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_threshold_shift_matches_file_thresholds(seed):
    doc = generators.random_game(seed)
    shifted = dict(doc, thresholds=["1"] * doc["dimensions"])
    a, b = validate_game(doc), validate_game(shifted)
    manual = a.rewards.shifted([F(1)] * a.rewards.dim)
    assert games.game_value_fm(a.game, manual).values == games.game_value_fm(b.game, b.rewards).values


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_meansup_set_and_complement(seed):
    g, r = _random_game(seed)
    peel = games.peel_meansup(g, r)
    assert games.check_np_certificate_assup(g, r, peel.win)
    # inside: no memoryless adversary lowers the value below 1
    for beta in games.min_strategies(g):
        vals = mdp.mdp_value_inf(apply_min_strategy(g, beta), r, "sup")
        assert all(vals[s] == 1 for s in peel.win)
    # outside: the composed peeling strategy refutes almost-sure winning
    beta = peel.min_strategy(g)
    vals = mdp.mdp_value_inf(apply_min_strategy(g, beta), r, "sup")
    lost = [s for s in g.states if s not in peel.win]
    assert all(vals[s] < 1 for s in lost)
    # replay: every pure memoryless reply of Max loses with positive probability
    m = apply_min_strategy(g, beta)
    for reply in _pure(m):
        probs = chain.objective_probability(induced_chain(m, pure_to_randomized(reply)), r)
        assert all(probs[s] < 1 for s in lost)


def _pure(m):
    choice = [s for s in m.states if len(m.enabled[s]) > 1]
    for combo in itertools.product(*(m.enabled[s] for s in choice)):
        yield dict(zip(choice, combo))


def test_copy_game_certificates_never_refute_one():
    inst = validate_game(generators.exponential(1))
    g, r = inst.game, inst.rewards
    for beta in games.min_strategies(g):
        assert not games.check_conp_certificate_fm(g, r, games.ConpCertificate(beta, F(1), "s_0"))


def test_min_absorbing_negative_state():
    doc = {
        "dimensions": 1,
        "actions": ["a", "b"],
        "states": [
            {"id": "m", "owner": "min", "reward": [0], "transitions": {"a": [["z", 1]], "b": [["bad", 1]]}},
            {"id": "z", "owner": "max", "reward": [0], "transitions": {"a": [["z", 1]]}},
            {"id": "bad", "owner": "min", "reward": [-1], "transitions": {"a": [["bad", 1]]}},
        ],
    }
    inst = validate_game(doc)
    g, r = inst.game, inst.rewards
    assert games.game_value_fm(g, r).values == {"m": 0, "z": 1, "bad": 0}
    answer = games.value_threshold_query(g, r, "bad", F(1, 2))
    assert not answer.holds and answer.certificate.strategy["bad"] == "a"
    assert games.almost_sure_onedim_game(g, r, 0) == {"z"}
    peel = games.peel_meansup(g, r)
    assert peel.win == {"z"} and peel.layers[0].violating == {"m", "bad"}


def test_np_certificate_rejections():
    inst = validate_game(generators.exponential(1))
    g, r = inst.game, inst.rewards
    assert not games.check_np_certificate_assup(g, r, {"nowhere"})
    res = games.check_np_certificate_assup(g, r, {"s_0", "s_1", "s_1^L"})
    assert not res and "leave" in res.reason
    assert games.check_np_certificate_assup(g, r, set(g.states))
    assert games.check_np_certificate_assup(g, r, set())
    # Max cannot win the first dimension while Min loops on its gadget only
    shifted = r.shifted([F(1), F(0)])
    res = games.check_np_certificate_assup(g, shifted, set(g.states))
    assert not res and "dimension 1" in res.reason


def _negative_cycle(p, weights, sources):
    """Bellman-Ford over the deterministic graph reachable from ``sources``."""
    seen, todo = set(sources), list(sources)
    while todo:
        s = todo.pop()
        for a in p.enabled[s]:
            for t in p.transitions[(s, a)]:
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
    dist = {s: F(0) for s in seen}
    edges = [(s, t) for s in seen for a in p.enabled[s] for t in p.transitions[(s, a)]]
    for _ in range(len(seen)):
        changed = False
        for s, t in edges:
            if dist[s] + weights[s] < dist[t]:
                dist[t] = dist[s] + weights[s]
                changed = True
        if not changed:
            return False
    return True


@pytest.mark.parametrize("k", [1, 2, 3])
def test_copy_strategy_wins_against_every_path(k):
    inst = validate_game(generators.exponential(k))
    g, r = inst.game, inst.rewards
    sigma = generators.copy_strategy(k)
    p = product_mdp(g, sigma)
    lifted = r.lift(p.origin)
    starts = [f"{s}|{sigma.initial}" for s in g.states]
    for j in range(r.dim):
        weights = {s: lifted.component(s, j) for s in p.states}
        assert not _negative_cycle(p, weights, starts)


@pytest.mark.parametrize("k", [1, 2])
def test_memoryless_max_strategies_lose_exponential(k):
    inst = validate_game(generators.exponential(k))
    # one memory value: Max always plays L; Min then plays R and dimension 2 drops
    fixed = TransducerStrategy(("m",), "m", {("m", s): "m" for s in inst.game.states}, {"m": {"L": F(1)}})
    p = product_mdp(inst.game, fixed)
    lifted = inst.rewards.lift(p.origin)
    weights = {s: lifted.component(s, 1) for s in p.states}
    assert _negative_cycle(p, weights, [p.initial])


def test_exponential_values_and_witness():
    inst = validate_game(generators.exponential(2))
    verdict = games.game_value_fm(inst.game, inst.rewards)
    assert set(verdict.values.values()) == {1}
    # witnesses are total on Min states, forced moves included
    assert verdict.adversary_witness == {s: "L" for s in inst.game.min_states}
    assert len(verdict.adversary_witness) == 7
    assert games.memory_bound(inst.game) == 2 ** len(inst.game.min_states)


def test_size_guard(monkeypatch):
    inst = validate_game(generators.exponential(3))
    with pytest.raises(games.SizeGuardError):
        games.game_value_fm(inst.game, inst.rewards, limit=7)
    monkeypatch.setenv(games.MAX_ADVERSARIES_ENV, "4")
    with pytest.raises(games.SizeGuardError):
        games.almost_sure_meansup(inst.game, inst.rewards)


def test_parallel_matches_serial():
    inst = validate_game(generators.exponential(2))
    serial = games.game_value_fm(inst.game, inst.rewards, jobs=1)
    parallel = games.game_value_fm(inst.game, inst.rewards, jobs=2)
    assert serial == parallel


def test_threshold_query():
    inst = validate_game(generators.fig_not_connected())
    g, r = inst.game, inst.rewards
    no = games.value_threshold_query(g, r, "s1", F(1, 2))
    assert not no.holds and no.value == 0 and no.certificate.state == "s1"
    yes = games.value_threshold_query(g, r, "s1", F(1), mode="inf-meaninf")
    assert yes.holds and yes.certificate is None
    with pytest.raises(ValueError):
        games.value_threshold_query(g, r, "s1", F(3, 2))


def test_one_dimension_game_sets():
    inst = validate_game(generators.exponential(1))
    g = inst.game
    only_first = RewardFunction(1, {s: (inst.rewards.component(s, 0),) for s in g.states})
    assert games.almost_sure_onedim_game(g, only_first, 0) == frozenset(g.states)
