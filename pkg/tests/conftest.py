import numpy as np
import pytest

from qldpctoolkit.complexes import hypergraph_product, repetition_complex
from qldpctoolkit.config import ExperimentConfig
from qldpctoolkit.product_decoders import hgp_product, lp_product
from qldpctoolkit.tanner import (
    BaseEdge,
    BaseGraph,
    TannerCode,
    find_inner_code,
    lift_graph,
    random_tanner_code,
    repetition_tanner_code,
    spectral_expansion,
)


@pytest.fixture(autouse=True)
def _no_seed_override(monkeypatch):
    monkeypatch.delenv("QLDPC_SEED", raising=False)


def complete_base_graph(v0: int, ell: int, rng: np.random.Generator) -> BaseGraph:
    """K_{v0} with random labels; port at x toward y is y (y < x) or y - 1 (y > x)."""
    edges = []
    for u in range(v0):
        for w in range(u + 1, v0):
            edges.append(BaseEdge(u, w, int(rng.integers(ell)), w - 1, u))
    return BaseGraph(v0, v0 - 1, tuple(edges))


def k7_code(ell: int, seed: int) -> TannerCode:
    """Lift of K_7 (no parallel edges or self-loops in any lift) with a [6, 3] inner code."""
    rng = np.random.default_rng(seed)
    inner = find_inner_code(6, 3, 3, rng)
    lifted = lift_graph(complete_base_graph(7, ell, rng), ell)
    return TannerCode(lifted, inner, spectral_expansion(lifted))


@pytest.fixture(scope="session")
def small_tanner():
    """Random lift: v0=4, delta=6, gamma=3, d_min=3, ell=4."""
    return random_tanner_code(4, 6, 4, np.random.default_rng(7), gamma=3, d_min=3, max_lift_tries=3)


@pytest.fixture(scope="session")
def k7_tanner():
    return k7_code(4, 11)


@pytest.fixture(scope="session")
def k7_tanner_32():
    return k7_code(32, 41)


@pytest.fixture(scope="session")
def k7_tanner_64():
    return k7_code(64, 42)


@pytest.fixture(scope="session")
def toric4():
    rep = repetition_complex(4)
    return hypergraph_product(rep, rep)


@pytest.fixture(scope="session")
def toric_product():
    return hgp_product(repetition_tanner_code(4), 4)


@pytest.fixture(scope="session")
def k7_hgp(k7_tanner):
    return hgp_product(k7_tanner, 3)


@pytest.fixture(scope="session")
def small_lp(small_tanner):
    return lp_product(small_tanner)


@pytest.fixture(scope="session")
def k7_lp(k7_tanner):
    return lp_product(k7_tanner)


@pytest.fixture
def toric_config(tmp_path):
    """Repetition factor, hgp mode, ell=4: the [[32, 2, 4]] toric code, outputs under tmp_path."""
    return ExperimentConfig(
        mode="hgp",
        classical="repetition",
        ell=4,
        error_weights=[0, 1],
        trials=3,
        bundle_path=str(tmp_path / "bundle.json"),
        trials_path=str(tmp_path / "trials.jsonl"),
        summary_path=str(tmp_path / "summary.csv"),
    )


@pytest.fixture(scope="session")
def large_tanner():
    """Acceptance-scale factor: v0=8, Delta=14, [14, 10] inner code, ell=32."""
    return random_tanner_code(8, 14, 32, np.random.default_rng(8), gamma=4, d_min=3, max_lift_tries=5)
