"""polepi: coupled partisan-sorting opinion dynamics and SIS epidemics on one network.

The package simulates two interleaved stochastic processes over a shared
static scale-free graph: an opinion-copying process whose partner pool is
a tunable mix of graph neighbours and random nodes (the digital-media
knob gamma), and an SIS epidemic whose infection rate is attenuated for
disease-aware agents. On top of the simulator sit campaign runners, an
analysis toolkit, an HTTP service and a thin CLI client.
"""

__version__ = "0.1.0"

from polepi.engine import Params, RunRecord, run
from polepi.epi_dynamics import EpiParams
from polepi.graph import Graph, GraphSpec, generate_holme_kim
from polepi.info_dynamics import InfoParams

__all__ = [
    "EpiParams",
    "Graph",
    "GraphSpec",
    "InfoParams",
    "Params",
    "RunRecord",
    "generate_holme_kim",
    "run",
    "__version__",
]
