import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polepi.graph import GraphSpec, generate_holme_kim


@pytest.fixture(scope="session")
def small_graph():
    return generate_holme_kim(GraphSpec(n_nodes=60, m_attach=3, p_triad=0.1, seed=5))


@pytest.fixture(scope="session")
def acceptance_dir(tmp_path_factory) -> Path:
    """Campaign cache for the acceptance suite.

    Point POLEPI_ACCEPTANCE_DIR at a persistent directory to reuse
    completed campaign runs across pytest invocations (the runner's
    resume logic skips finished runs).
    """
    env = os.environ.get("POLEPI_ACCEPTANCE_DIR")
    if env:
        path = Path(env)
        path.mkdir(parents=True, exist_ok=True)
        return path
    return tmp_path_factory.mktemp("acceptance")
