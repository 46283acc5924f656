"""Run orchestration: initialisation, step scheduling, sampling, seeding, CSV rows.

A run is fully determined by its `Params` (including both the state seed
and the graph spec's seed). All randomness flows through one `SimRng`
consumed in a fixed order: initialisation draws parties, topic opinions,
awareness flags and infection states (each N draws, node order); then
each iteration performs one information step (node pick, neighbour
sample, global sample, partner pick, trait pick) followed, every
`epi_interval`-th iteration, by one epidemic step.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

from pydantic import BaseModel, Field

from polepi.epi_dynamics import EpiParams, epi_step, init_epidemic
from polepi.graph import Graph, GraphSpec
from polepi.info_dynamics import InfoParams, info_step
from polepi.metrics import snapshot
from polepi.rng import SimRng, splitmix64
from polepi.state import SimState

CSV_COLUMNS = [
    "gamma",
    "beta",
    "mu",
    "epsilon",
    "epi_interval",
    "seed",
    "step",
    "psi",
    "rho_a",
    "rho_i",
]

# domain-separation tag for deriving a per-run graph seed from a state seed
_GRAPH_SEED_TAG = 0xA5C1E7B2D94F3068


class Params(BaseModel):
    """Complete configuration of one simulation run."""

    model_config = {"frozen": True}

    graph: GraphSpec = GraphSpec()
    info: InfoParams = InfoParams()
    epi: EpiParams = EpiParams()
    rho_a0: float = Field(default=0.5, ge=0.0, le=1.0)
    steps: int = Field(default=50_000, ge=1)
    epi_interval: int = Field(default=1, ge=1)
    record_interval: int = Field(default=0, ge=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    psi_excludes_awareness: bool = False


class Sample(NamedTuple):
    step: int
    psi: float
    rho_a: float
    rho_i: float


@dataclass(frozen=True)
class RunRecord:
    """Sampled observables of one run, keyed by the params digest and seed."""

    params_digest: str
    seed: int
    samples: list[Sample]
    final: Sample


def params_digest(p: Params) -> str:
    """Stable 16-hex-digit digest of the full parameter set."""
    payload = json.dumps(p.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def derive_seed(base_seed: int, run_index: int, grid_index: int) -> int:
    """Collision-resistant per-run seed from (base, replicate, grid point).

    Three chained splitmix64 avalanches; the mapping is pure, documented
    and platform-independent, so campaign results are reproducible
    anywhere.
    """
    z = splitmix64(base_seed)
    z = splitmix64(z ^ ((grid_index * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF))
    z = splitmix64(z ^ ((run_index * 0xC2B2AE3D27D4EB4F) & 0xFFFFFFFFFFFFFFFF))
    return z


def graph_seed_for(state_seed: int) -> int:
    """Companion graph seed for a run seed (fresh-topology-per-run mode)."""
    return splitmix64(state_seed ^ _GRAPH_SEED_TAG)


def init_state(g: Graph, p: Params, rng: SimRng) -> SimState:
    """Draw the initial population state.

    Parties are i.i.d. uniform over {1..k}; each topic component i.i.d.
    uniform over {1..m}; awareness Bernoulli(rho_a0); infection
    Bernoulli(rho_i0) via `init_epidemic`.
    """
    n_nodes = g.node_count
    k, n, m = p.info.k, p.info.n, p.info.m
    party = [1 + int(rng.uniform() * k) for _ in range(n_nodes)]
    opinions = []
    for _ in range(n_nodes):
        row = [1 + int(rng.uniform() * m) for _ in range(n - 1)]
        row.append(1 if rng.uniform() < p.rho_a0 else 0)
        opinions.append(row)
    state = SimState(party, opinions, [0] * n_nodes)
    init_epidemic(state, p.epi, rng)
    return state


def _sample(state: SimState, p: Params, step: int) -> Sample:
    snap = snapshot(state, include_awareness=not p.psi_excludes_awareness)
    return Sample(step, snap.psi, snap.rho_a, snap.rho_i)


def run(g: Graph, p: Params) -> RunRecord:
    """Execute one simulation.

    Iteration t in 1..steps performs one info_step, plus one epi_step
    whenever t is a multiple of epi_interval. With record_interval > 0
    the observables are sampled at step 0 and at every multiple of
    record_interval; the final state is always sampled.
    """
    if g.node_count != p.graph.n_nodes:
        raise ValueError("graph size does not match params.graph.n_nodes")
    rng = SimRng(p.seed)
    state = init_state(g, p, rng)
    info_p, epi_p = p.info, p.epi
    epi_interval = p.epi_interval
    record_interval = p.record_interval

    samples: list[Sample] = []
    if record_interval:
        samples.append(_sample(state, p, 0))
    for t in range(1, p.steps + 1):
        info_step(g, state, info_p, rng)
        if t % epi_interval == 0:
            epi_step(g, state, epi_p, rng)
        if record_interval and t % record_interval == 0:
            samples.append(_sample(state, p, t))

    if samples and samples[-1].step == p.steps:
        final = samples[-1]
    else:
        final = _sample(state, p, p.steps)
    return RunRecord(params_digest(p), p.seed, samples, final)


def format_value(v) -> str:
    """Canonical CSV cell: shortest round-trip repr for floats, str otherwise."""
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


def record_rows(p: Params, rec: RunRecord) -> list[list[str]]:
    """CSV rows (one per sample, plus the final state if not already sampled)."""
    rows = list(rec.samples)
    if not rows or rows[-1].step != rec.final.step:
        rows.append(rec.final)
    out = []
    for s in rows:
        out.append(
            [
                format_value(p.info.gamma),
                format_value(p.epi.beta),
                format_value(p.epi.mu),
                format_value(p.epi.epsilon),
                str(p.epi_interval),
                str(p.seed),
                str(s.step),
                format_value(s.psi),
                format_value(s.rho_a),
                format_value(s.rho_i),
            ]
        )
    return out
