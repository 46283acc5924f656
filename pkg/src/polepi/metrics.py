"""Observables: pairwise opinion agreement, polarisation, aware and infected fractions.

Polarisation is the mean agreement within parties minus the mean
agreement across parties. It is evaluated through per-component value
histograms (O(k^2 * n * m) per snapshot instead of the O(N^2) pairwise
loop, which the test suite keeps as an oracle).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from polepi.errors import UndefinedMetricError
from polepi.state import AWARE, AgentState, SimState


@dataclass(frozen=True)
class MetricsSnapshot:
    psi: float
    rho_a: float
    rho_i: float
    n_same_pairs: int
    n_diff_pairs: int


def pair_agreement(a: AgentState, b: AgentState, n: int | None = None) -> float:
    """Fraction of equal opinion components (awareness included as the last one)."""
    if n is None:
        n = len(a.opinion)
    matches = sum(1 for l in range(n) if a.opinion[l] == b.opinion[l])
    return matches / n


def polarisation(state: SimState, include_awareness: bool = True) -> float:
    """Mean within-party agreement minus mean cross-party agreement.

    Raises UndefinedMetricError when either pair partition is empty
    (fewer than two parties present, or a single node). Invariant under
    node permutation and party relabelling.
    """
    n_cmp = state.n_components if include_awareness else state.n_components - 1
    parties = sorted(set(state.party))
    sizes = {p: 0 for p in parties}
    for p in state.party:
        sizes[p] += 1
    n_total = state.n_nodes
    n_same = sum(comb(s, 2) for s in sizes.values())
    n_diff = comb(n_total, 2) - n_same
    if n_same == 0 or n_diff == 0:
        raise UndefinedMetricError(
            "polarisation needs at least one same-party and one cross-party pair"
        )

    # counts[l][value][party] -> number of nodes
    match_same = 0
    match_diff = 0
    for l in range(n_cmp):
        by_value: dict[int, dict[int, int]] = {}
        for i in range(n_total):
            v = state.opinions[i][l]
            by_party = by_value.setdefault(v, {})
            p = state.party[i]
            by_party[p] = by_party.get(p, 0) + 1
        for by_party in by_value.values():
            total = sum(by_party.values())
            same = sum(comb(c, 2) for c in by_party.values())
            match_same += same
            match_diff += comb(total, 2) - same

    mean_same = match_same / (n_cmp * n_same)
    mean_diff = match_diff / (n_cmp * n_diff)
    return mean_same - mean_diff


def aware_fraction(state: SimState) -> float:
    return sum(1 for row in state.opinions if row[-1] == AWARE) / state.n_nodes


def infected_fraction(state: SimState) -> float:
    return sum(state.infected) / state.n_nodes


def snapshot(state: SimState, include_awareness: bool = True) -> MetricsSnapshot:
    """All observables at once; psi is NaN when polarisation is undefined."""
    parties: dict[int, int] = {}
    for p in state.party:
        parties[p] = parties.get(p, 0) + 1
    n_same = sum(comb(s, 2) for s in parties.values())
    n_diff = comb(state.n_nodes, 2) - n_same
    try:
        psi = polarisation(state, include_awareness=include_awareness)
    except UndefinedMetricError:
        psi = float("nan")
    return MetricsSnapshot(
        psi=psi,
        rho_a=aware_fraction(state),
        rho_i=infected_fraction(state),
        n_same_pairs=n_same,
        n_diff_pairs=n_diff,
    )
