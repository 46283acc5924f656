"""Epidemic-layer update: SIS transitions with awareness-modulated infection.

Aware agents are infected at rate epsilon * beta instead of beta. The two
inter-layer couplings are configurable: becoming infected sets the
awareness flag, and recovering clears it.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from polepi.graph import Graph
from polepi.rng import SimRng
from polepi.state import AWARE, UNAWARE, SimState


class EpiParams(BaseModel):
    """Epidemic-layer constants.

    beta is the per-neighbour infection probability for unaware agents;
    epsilon scales it for aware agents (0 = full protection, 1 = no
    effect). The epsilon default of 0.25 was fixed by the
    epsilon-calibration campaign (see README). infection_sets_aware
    defaults off: with it on, the awareness flux from a high-prevalence
    epidemic drives every camp to full awareness once sorting sets in,
    which inverts the severe-scenario polarisation/infection trend.
    """

    model_config = {"frozen": True}

    beta: float = Field(default=0.05, ge=0.0, le=1.0)
    mu: float = Field(default=0.01, ge=0.0, le=1.0)
    epsilon: float = Field(default=0.25, ge=0.0, le=1.0)
    rho_i0: float = Field(default=0.2, ge=0.0, le=1.0)
    infection_sets_aware: bool = False
    recovery_resets_aware: bool = True


def infection_probability(aware: bool, k_inf: int, p: EpiParams) -> float:
    """Probability that at least one of k_inf infected neighbours transmits.

    1 - (1 - beta_eff)**k_inf with beta_eff = epsilon*beta for aware
    agents and beta otherwise.
    """
    beta_eff = p.epsilon * p.beta if aware else p.beta
    return 1.0 - (1.0 - beta_eff) ** k_inf


def init_epidemic(state: SimState, p: EpiParams, rng: SimRng) -> None:
    """Independently infect each node with probability rho_i0 (one uniform per node)."""
    infected = state.infected
    for i in range(len(infected)):
        infected[i] = 1 if rng.uniform() < p.rho_i0 else 0


def epi_step(g: Graph, state: SimState, p: EpiParams, rng: SimRng) -> None:
    """One SIS update of a single uniformly chosen node.

    Susceptible node: infect with `infection_probability` over its
    currently infected neighbours; on infection the awareness flag is set
    when `infection_sets_aware`. Infected node: recover with probability
    mu; on recovery the flag is cleared when `recovery_resets_aware`.
    A uniform is consumed for the infection check only when the computed
    probability is positive; the recovery check always consumes one.
    """
    i = rng.randint(g.node_count)
    infected = state.infected
    if infected[i]:
        if rng.uniform() < p.mu:
            infected[i] = 0
            if p.recovery_resets_aware:
                state.opinions[i][-1] = UNAWARE
        return
    k_inf = sum(map(infected.__getitem__, g.adjacency[i]))
    if k_inf == 0:
        return
    beta_eff = p.epsilon * p.beta if state.opinions[i][-1] == AWARE else p.beta
    if beta_eff <= 0.0:
        return
    p_inf = 1.0 - (1.0 - beta_eff) ** k_inf
    if rng.uniform() < p_inf:
        infected[i] = 1
        if p.infection_sets_aware:
            state.opinions[i][-1] = AWARE
