"""Information-layer update: interaction sets, homophilous partner choice, opinion adoption.

One `info_step` updates a single uniformly chosen node: it assembles an
interaction set that mixes graph neighbours with random nodes (the
digital-media knob `gamma`), picks a partner with probability
proportional to similarity**h, and copies one differing opinion
component from the partner.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Optional

from pydantic import BaseModel, Field

from polepi.graph import Graph
from polepi.rng import SimRng
from polepi.state import AgentState, SimState

_INT_SNAP = 1e-9


class InfoParams(BaseModel):
    """Information-layer constants.

    gamma: probability mass of interaction partners drawn from the whole
        population instead of the neighbourhood.
    c: weight of sharing a party label relative to sharing one opinion
        component.
    h: homophily exponent on similarity when choosing a partner.
    n: opinion vector length (n-1 topics plus the awareness flag).
    m: stances per topic.
    k: number of party labels.
    similarity_includes_awareness: whether the awareness component counts
        toward similarity (sensitivity switch; on by default).
    """

    model_config = {"frozen": True}

    gamma: float = Field(default=0.5, ge=0.0, le=1.0)
    c: float = Field(default=2.0, ge=0.0)
    h: float = Field(default=32.0, ge=0.0)
    n: int = Field(default=5, ge=2)
    m: int = Field(default=3, ge=2)
    k: int = Field(default=2, ge=2)
    similarity_includes_awareness: bool = True


def partisan_match(a: AgentState, b: AgentState) -> int:
    """1 if the two agents carry the same party label, else 0."""
    return 1 if a.party == b.party else 0


def opinion_match(a: AgentState, b: AgentState, component: int) -> int:
    """1 if opinion component `component` (1-based; n = awareness) agrees."""
    n = len(a.opinion)
    if not 1 <= component <= n:
        raise ValueError(f"component {component} out of range [1, {n}]")
    return 1 if a.opinion[component - 1] == b.opinion[component - 1] else 0


def similarity(a: AgentState, b: AgentState, p: InfoParams) -> float:
    """Weighted fraction of shared traits: (c*party + matching components) / (c + n)."""
    n_cmp = p.n if p.similarity_includes_awareness else p.n - 1
    score = p.c * partisan_match(a, b)
    score += sum(1 for l in range(n_cmp) if a.opinion[l] == b.opinion[l])
    return score / (p.c + n_cmp)


def _floor_snapped(x: float) -> int:
    """floor(x) with values within 1e-9 of an integer treated as that integer.

    Guards against double rounding pulling (1-gamma)*k below an exact
    integer, which would otherwise shrink the interaction set by one.
    """
    r = round(x)
    if abs(x - r) < _INT_SNAP:
        return r
    return math.floor(x)


def _ceil_snapped(x: float) -> int:
    r = round(x)
    if abs(x - r) < _INT_SNAP:
        return r
    return math.ceil(x)


def interaction_counts(degree: int, gamma: float) -> tuple[int, int]:
    """(neighbour draws, global draws) = (floor((1-gamma)*k), ceil(gamma*k))."""
    return _floor_snapped((1.0 - gamma) * degree), _ceil_snapped(gamma * degree)


def build_interaction_set(g: Graph, i: int, gamma: float, rng: SimRng) -> list[int]:
    """Candidate pool for node i's update.

    floor((1-gamma)*k_i) nodes sampled without replacement from the
    neighbourhood, then ceil(gamma*k_i) nodes sampled without replacement
    from V minus {i}. The two draws are independent, so a node may occupy
    one slot in each. An isolated node yields an empty pool, which the
    caller treats as a skipped step.
    """
    k_i = len(g.adjacency[i])
    if k_i == 0:
        return []
    n_nb, n_gl = interaction_counts(k_i, gamma)
    cands = rng.sample_prefix(g.adjacency[i], n_nb) if n_nb else []
    if n_gl:
        cands = cands + rng.sample_ids_excluding(g.node_count, n_gl, i)
    return cands


@lru_cache(maxsize=64)
def _kernel(p: InfoParams):
    """Precomputed per-params pieces of the step: component count, denominator,
    and (for integral c) a lookup table of similarity**h by raw match score."""
    n_cmp = p.n if p.similarity_includes_awareness else p.n - 1
    den = p.c + n_cmp
    table = None
    if p.c == int(p.c):
        c_int = int(p.c)
        table = [(s / den) ** p.h for s in range(c_int + n_cmp + 1)]
    return n_cmp, den, p.c, p.h, table


def _partner_weights(i: int, candidates: list[int], state: SimState, p: InfoParams) -> list[float]:
    n_cmp, den, c, h, table = _kernel(p)
    party = state.party
    opinions = state.opinions
    p_i = party[i]
    # truncating the updater's vector once lets zip bound the comparison loop
    v_i = state.opinions[i][:n_cmp]
    weights = []
    if table is not None:
        c_int = int(c)
        for j in candidates:
            v_j = opinions[j]
            s = c_int if party[j] == p_i else 0
            for a, b in zip(v_i, v_j):
                if a == b:
                    s += 1
            weights.append(table[s])
    else:
        for j in candidates:
            v_j = opinions[j]
            s = c if party[j] == p_i else 0.0
            for a, b in zip(v_i, v_j):
                if a == b:
                    s += 1
            weights.append((s / den) ** h)
    return weights


def select_partner(
    i: int, candidates: list[int], state: SimState, p: InfoParams, rng: SimRng
) -> Optional[int]:
    """Draw one candidate with probability similarity**h / sum(similarity**h).

    Returns None when every candidate has zero weight (an agent with
    nothing in common interacts with no one); no uniform is consumed in
    that case. With h = 0 the convention 0**0 = 1 applies, so all
    candidates are equally likely.
    """
    weights = _partner_weights(i, candidates, state, p)
    total = math.fsum(weights)
    if total <= 0.0:
        return None
    u = rng.uniform() * total
    acc = 0.0
    for idx, w in enumerate(weights):
        acc += w
        if u < acc:
            return candidates[idx]
    return candidates[-1]  # guard against fsum/accumulation rounding


def adopt_opinion(i: int, j: int, state: SimState, rng: SimRng) -> bool:
    """Copy one uniformly chosen differing component of j's vector onto i.

    Returns False (and consumes no randomness) when the vectors already
    agree everywhere. The awareness component is copyable like any topic;
    party labels are never touched.
    """
    v_i = state.opinions[i]
    v_j = state.opinions[j]
    diffs = [l for l in range(len(v_i)) if v_i[l] != v_j[l]]
    if not diffs:
        return False
    l = diffs[int(rng.uniform() * len(diffs))]
    v_i[l] = v_j[l]
    return True


def info_step(g: Graph, state: SimState, p: InfoParams, rng: SimRng) -> None:
    """One information-layer update.

    Draw order: node pick, neighbour sample, global sample, partner pick,
    trait pick. The step is a no-op when the interaction set is empty or
    no partner has positive weight.
    """
    i = rng.randint(g.node_count)
    candidates = build_interaction_set(g, i, p.gamma, rng)
    if not candidates:
        return
    j = select_partner(i, candidates, state, p, rng)
    if j is None:
        return
    adopt_opinion(i, j, state, rng)
