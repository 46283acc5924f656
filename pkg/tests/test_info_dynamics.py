import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import partner_probabilities, similarity_fraction
from polepi.graph import Graph, generate_holme_kim, GraphSpec
from polepi.info_dynamics import (
    InfoParams,
    adopt_opinion,
    build_interaction_set,
    info_step,
    interaction_counts,
    opinion_match,
    partisan_match,
    select_partner,
    similarity,
)
from polepi.rng import SimRng
from polepi.state import AgentState, SimState

# chi-square 0.999 quantiles by degrees of freedom
CHI2_999 = {1: 10.828, 2: 13.816, 3: 16.266, 4: 18.467}


def agent(party, *vec):
    return AgentState(party=party, opinion=tuple(vec))


def test_partisan_match():
    a, b, c = agent(1, 1, 1, 1, 1, 0), agent(1, 2, 3, 1, 2, 1), agent(2, 1, 1, 1, 1, 0)
    assert partisan_match(a, b) == 1
    assert partisan_match(a, c) == 0
    assert partisan_match(a, a) == 1


def test_opinion_match_components():
    a = agent(1, 1, 2, 3, 1, 0)
    b = agent(2, 1, 2, 1, 1, 0)
    assert opinion_match(a, b, 1) == 1
    assert opinion_match(a, b, 3) == 0
    assert opinion_match(a, b, 5) == 1  # awareness component
    both_aware = agent(1, 1, 1, 1, 1, 1), agent(2, 3, 3, 3, 3, 1)
    assert opinion_match(*both_aware, 5) == 1
    with pytest.raises(ValueError):
        opinion_match(a, b, 0)
    with pytest.raises(ValueError):
        opinion_match(a, b, 6)


def test_similarity_examples():
    p = InfoParams()
    a = agent(1, 1, 2, 3, 1, 1)
    assert similarity(a, a, p) == 1.0
    b = agent(2, 2, 3, 1, 2, 0)
    assert similarity(a, b, p) == 0.0
    # same party, 3 of 5 components equal: (2 + 3) / 7
    c = agent(1, 1, 2, 3, 2, 0)
    assert math.isclose(similarity(a, c, p), 5 / 7, rel_tol=0, abs_tol=1e-15)


def test_similarity_excluding_awareness():
    p = InfoParams(similarity_includes_awareness=False)
    a = agent(1, 1, 2, 3, 1, 1)
    b = agent(1, 1, 2, 3, 1, 0)  # differs only in awareness
    assert similarity(a, b, p) == 1.0
    c = agent(2, 2, 3, 1, 2, 1)
    assert similarity(a, c, p) == 0.0


@settings(max_examples=100, deadline=None)
@given(
    pa=st.integers(1, 2),
    pb=st.integers(1, 2),
    va=st.lists(st.integers(1, 3), min_size=5, max_size=5),
    vb=st.lists(st.integers(1, 3), min_size=5, max_size=5),
)
def test_similarity_symmetric_and_bounded(pa, pb, va, vb):
    p = InfoParams()
    a, b = agent(pa, *va), agent(pb, *vb)
    s_ab, s_ba = similarity(a, b, p), similarity(b, a, p)
    assert s_ab == s_ba
    assert 0.0 <= s_ab <= 1.0
    assert (s_ab == 1.0) == (pa == pb and va == vb)
    oracle = similarity_fraction(pa, pb, tuple(va), tuple(vb), 2)
    assert abs(s_ab - float(oracle)) < 1e-15


def test_interaction_counts_examples():
    assert interaction_counts(7, 0.0) == (7, 0)
    assert interaction_counts(7, 1.0) == (0, 7)
    assert interaction_counts(5, 0.5) == (2, 3)
    # fp guard: 0.3 * 90 rounds below the exact integer 27
    assert interaction_counts(90, 0.3) == (63, 27)


def test_interaction_set_size_equals_degree():
    g = generate_holme_kim(GraphSpec(n_nodes=200, m_attach=3, p_triad=0.1, seed=2))
    rng = SimRng(0)
    for gamma in [round(0.02 * i, 2) for i in range(51)]:
        for i in (0, 5, 100, 199):
            cands = build_interaction_set(g, i, gamma, rng)
            assert len(cands) == g.degree(i)


def test_interaction_set_gamma_extremes():
    g = generate_holme_kim(GraphSpec(n_nodes=100, m_attach=4, p_triad=0.0, seed=8))
    rng = SimRng(3)
    nbrs = set(g.adjacency[10])
    only_nbrs = build_interaction_set(g, 10, 0.0, rng)
    assert set(only_nbrs) <= nbrs and len(only_nbrs) == len(nbrs)
    global_draw = build_interaction_set(g, 10, 1.0, rng)
    assert len(global_draw) == g.degree(10)
    assert 10 not in global_draw
    assert len(set(global_draw)) == len(global_draw)  # without replacement


def test_isolated_node_yields_empty_set():
    g = Graph.from_edges(3, [(0, 1)])
    rng = SimRng(1)
    assert build_interaction_set(g, 2, 0.5, rng) == []


def _two_candidate_state():
    # c=1, n=3: delta(i, 1) = (1 + 3) / 4 = 1, delta(i, 2) = (1 + 1) / 4 = 0.5
    state = SimState(
        party=[1, 1, 1],
        opinions=[[1, 2, 0], [1, 2, 0], [1, 3, 1]],
        infected=[0, 0, 0],
    )
    return state, InfoParams(c=1.0, h=1.0, n=3, m=3, k=2)


def test_select_partner_single_candidate():
    state, params = _two_candidate_state()
    rng = SimRng(4)
    assert all(select_partner(0, [1], state, params, rng) == 1 for _ in range(20))


def test_select_partner_two_to_one_odds():
    state, params = _two_candidate_state()
    rng = SimRng(5)
    trials = 30_000
    hits = Counter(select_partner(0, [1, 2], state, params, rng) for _ in range(trials))
    # exact probabilities 2/3 and 1/3; allow 4 standard errors
    se = math.sqrt((2 / 3) * (1 / 3) / trials)
    assert abs(hits[1] / trials - 2 / 3) < 4 * se


def test_select_partner_all_zero_similarity_returns_none():
    state = SimState(
        party=[1, 2, 2],
        opinions=[[1, 1, 0], [2, 2, 1], [3, 3, 1]],
        infected=[0, 0, 0],
    )
    params = InfoParams(c=2.0, h=32.0, n=3, m=3, k=2)
    rng = SimRng(6)
    assert select_partner(0, [1, 2], state, params, rng) is None


def test_select_partner_h_zero_uniform_over_zero_similarity():
    # 0**0 == 1: candidates with zero similarity still get weight 1 at h=0
    state = SimState(
        party=[1, 2, 2, 2],
        opinions=[[1, 1, 0], [2, 2, 1], [3, 3, 1], [2, 3, 1]],
        infected=[0, 0, 0, 0],
    )
    params = InfoParams(c=2.0, h=0.0, n=3, m=3, k=2)
    rng = SimRng(7)
    trials = 30_000
    hits = Counter(select_partner(0, [1, 2, 3], state, params, rng) for _ in range(trials))
    for j in (1, 2, 3):
        assert abs(hits[j] / trials - 1 / 3) < 4 * math.sqrt((1 / 3) * (2 / 3) / trials)


def test_partner_frequencies_match_exact_probabilities():
    # five-candidate set, frequencies over 1e5 trials vs exact Eq-style weights
    state = SimState(
        party=[1, 1, 1, 2, 2, 1],
        opinions=[
            [1, 2, 3, 1, 1],
            [1, 2, 3, 1, 1],
            [1, 2, 1, 2, 1],
            [1, 2, 3, 1, 1],
            [3, 1, 2, 3, 0],
            [1, 2, 3, 2, 0],
        ],
        infected=[0] * 6,
    )
    params = InfoParams(c=2.0, h=4.0, n=5, m=3, k=2)
    cands = [1, 2, 3, 4, 5]
    exact = partner_probabilities(
        1,
        tuple(state.opinions[0]),
        [(state.party[j], tuple(state.opinions[j])) for j in cands],
        c=2,
        h=4,
    )
    rng = SimRng(8)
    trials = 100_000
    hits = Counter(select_partner(0, cands, state, params, rng) for _ in range(trials))
    chi2 = 0.0
    df = 0
    for j, p_exact in zip(cands, exact):
        expected = trials * float(p_exact)
        if expected > 0:
            chi2 += (hits[j] - expected) ** 2 / expected
            df += 1
    assert chi2 < CHI2_999[df - 1]


def test_adopt_opinion_cases():
    state = SimState(
        party=[1, 2],
        opinions=[[1, 2, 3, 1, 0], [1, 2, 3, 1, 0]],
        infected=[0, 0],
    )
    rng = SimRng(9)
    assert adopt_opinion(0, 1, state, rng) is False
    state.opinions[1] = [1, 2, 1, 1, 0]  # single differing component
    assert adopt_opinion(0, 1, state, rng) is True
    assert state.opinions[0] == state.opinions[1]
    state.opinions[0] = [2, 2, 1, 2, 1]
    state.opinions[1] = [1, 2, 3, 1, 1]  # three diffs
    assert adopt_opinion(0, 1, state, rng) is True
    diffs = sum(a != b for a, b in zip(state.opinions[0], state.opinions[1]))
    assert diffs == 2
    assert state.party == [1, 2]


@settings(max_examples=100, deadline=None)
@given(
    va=st.lists(st.integers(1, 3), min_size=4, max_size=4),
    vb=st.lists(st.integers(1, 3), min_size=4, max_size=4),
    aw=st.tuples(st.integers(0, 1), st.integers(0, 1)),
    seed=st.integers(0, 2**32),
)
def test_adopt_opinion_reduces_diffs_by_exactly_one(va, vb, aw, seed):
    state = SimState(
        party=[1, 2], opinions=[va + [aw[0]], vb + [aw[1]]], infected=[0, 0]
    )
    before = sum(a != b for a, b in zip(state.opinions[0], state.opinions[1]))
    changed = adopt_opinion(0, 1, state, SimRng(seed))
    after = sum(a != b for a, b in zip(state.opinions[0], state.opinions[1]))
    if before == 0:
        assert not changed and after == 0
    else:
        assert changed and after == before - 1


def test_info_step_fixed_point_when_identical():
    g = generate_holme_kim(GraphSpec(n_nodes=40, m_attach=2, p_triad=0.0, seed=1))
    state = SimState(
        party=[1 + (i % 2) for i in range(40)],
        opinions=[[1, 2, 3, 1, 1] for _ in range(40)],
        infected=[0] * 40,
    )
    rng = SimRng(10)
    params = InfoParams(gamma=0.5)
    snapshot = [row[:] for row in state.opinions]
    for _ in range(500):
        info_step(g, state, params, rng)
    assert state.opinions == snapshot


def test_info_step_preserves_party_labels(small_graph):
    n = small_graph.node_count
    rng = SimRng(11)
    state = SimState(
        party=[1 + rng.randint(2) for _ in range(n)],
        opinions=[[1 + rng.randint(3) for _ in range(4)] + [rng.randint(2)] for _ in range(n)],
        infected=[0] * n,
    )
    parties_before = list(state.party)
    params = InfoParams(gamma=0.3)
    for _ in range(2000):
        info_step(small_graph, state, params, rng)
    assert state.party == parties_before


def test_gamma_one_partner_independent_of_adjacency():
    # identical agents: uniform choice among global draws, so
    # P(partner is a neighbour) ~ k_i / (N - 1)
    g = generate_holme_kim(GraphSpec(n_nodes=120, m_attach=4, p_triad=0.0, seed=13))
    n = g.node_count
    state = SimState(
        party=[1] * n, opinions=[[1, 1, 1, 1, 1] for _ in range(n)], infected=[0] * n
    )
    params = InfoParams(gamma=1.0)
    rng = SimRng(14)
    node = 7
    k = g.degree(node)
    nbrs = set(g.adjacency[node])
    trials = 20_000
    hits = 0
    for _ in range(trials):
        cands = build_interaction_set(g, node, 1.0, rng)
        partner = select_partner(node, cands, state, params, rng)
        hits += partner in nbrs
    p_expect = k / (n - 1)
    se = math.sqrt(p_expect * (1 - p_expect) / trials)
    assert abs(hits / trials - p_expect) < 3 * se


def test_weight_underflow_bound():
    # smallest nonzero weight at defaults: (1/7)**32, far above double underflow
    w = (1 / 7) ** 32
    assert 0.0 < w < 1e-26
    assert w > 1e-28
