import math

import numpy as np
import pytest

from qldpctoolkit.errors import EnumerationBudgetError, GraphConstructionError, InnerCodeSearchError
from qldpctoolkit.f2 import BitMat, BitVec, mat_vec
from qldpctoolkit.group_algebra import expand_to_f2
from qldpctoolkit.tanner import (
    BaseEdge,
    BaseGraph,
    InnerCode,
    TannerCode,
    adjacency_matrix,
    build_tanner_complex,
    expander_mixing_holds,
    find_inner_code,
    inner_distances,
    lift_graph,
    random_base_graph,
    random_tanner_code,
    repetition_tanner_code,
    spectral_expansion,
)


def test_random_base_graph_is_regular():
    rng = np.random.default_rng(20)
    for v0, delta in [(2, 2), (6, 3), (8, 14), (5, 4)]:
        base = random_base_graph(v0, delta, 8, rng)
        assert base.degree_histogram() == [delta] * v0
        assert base.n_edges == v0 * delta // 2
        for e in base.edges:
            if e.is_loop:
                assert e.label % 8 != 0


def test_random_base_graph_is_seeded():
    a = random_base_graph(6, 4, 5, np.random.default_rng(3))
    b = random_base_graph(6, 4, 5, np.random.default_rng(3))
    assert a == b


def test_random_base_graph_rejects_infeasible():
    rng = np.random.default_rng(0)
    with pytest.raises(GraphConstructionError):
        random_base_graph(3, 3, 4, rng)
    with pytest.raises(GraphConstructionError):
        random_base_graph(4, 1, 4, rng)


def test_base_graph_port_validation():
    with pytest.raises(GraphConstructionError):
        BaseGraph(2, 1, (BaseEdge(0, 1, 0, 0, 1),))
    with pytest.raises(GraphConstructionError):
        BaseGraph(2, 2, (BaseEdge(0, 1, 0, 0, 0), BaseEdge(0, 1, 0, 0, 1)))


def test_lift_structure(small_tanner):
    G = small_tanner.graph
    assert G.n_vertices == 4 * 4
    assert G.n_edges == 4 * G.base.n_edges
    v = np.arange(G.n_vertices)[:, None]
    assert np.all((G.edge_ends[G.port_edge] == v[:, :, None]).any(axis=2))
    back = G.port_edge[G.port_peer, G.port_peer_port]
    assert np.array_equal(back, G.port_edge)
    assert not G.has_loop.any()
    assert np.allclose(adjacency_matrix(G).sum(axis=1), G.delta)


def test_trivial_lift_matches_base():
    base = random_base_graph(4, 3, 1, np.random.default_rng(1))
    G = lift_graph(base, 1)
    assert G.n_vertices == 4
    assert [tuple(e) for e in G.edge_ends.tolist()] == [(e.u, e.v) for e in base.edges]


def test_lift_rule():
    base = BaseGraph(2, 1, (BaseEdge(0, 1, 1, 0, 0),))
    G = lift_graph(base, 4)
    assert [tuple(e) for e in G.edge_ends.tolist()] == [(0, 5), (1, 6), (2, 7), (3, 4)]


def test_spectral_expansion_known_graphs():
    k4 = BaseGraph(
        4,
        3,
        tuple(BaseEdge(u, w, 0, w - 1, u) for u in range(4) for w in range(u + 1, 4)),
    )
    assert spectral_expansion(lift_graph(k4, 1)) == pytest.approx(1 / 3, abs=1e-9)
    matching = BaseGraph(2, 1, (BaseEdge(0, 1, 0, 0, 0),))
    assert spectral_expansion(lift_graph(matching, 2)) == pytest.approx(1.0)
    # odd cycles: the second largest |eigenvalue| is |cos(2 pi k / n)| at k = (n - 1) / 2
    for n in (5, 7, 9):
        assert repetition_tanner_code(n).measured_lambda == pytest.approx(math.cos(math.pi / n), abs=1e-9)
    assert repetition_tanner_code(6).measured_lambda == pytest.approx(1.0)


def test_spectral_budget(small_tanner):
    with pytest.raises(EnumerationBudgetError):
        spectral_expansion(small_tanner.graph, budget=4)


def test_expander_mixing(small_tanner):
    G = small_tanner.graph
    lam = small_tanner.measured_lambda
    rng = np.random.default_rng(21)
    for _ in range(100):
        size = int(rng.integers(1, G.n_vertices + 1))
        S = rng.choice(G.n_vertices, size=size, replace=False)
        assert expander_mixing_holds(G, S, lam)


def test_find_inner_code_small_cases():
    rng = np.random.default_rng(22)
    inner = find_inner_code(4, 1, 2, rng)
    assert inner.dense.tolist() == [[1, 1, 1, 1]]
    assert inner_distances(inner.dense) == (2, 4)
    assert find_inner_code(5, 2, 1, rng).Z.shape == (2, 5)


def test_find_inner_code_default_shape():
    inner = find_inner_code(14, 4, 3, np.random.default_rng(23))
    d_ker, d_im = inner_distances(inner.dense)
    assert d_ker >= 3 and d_im >= 3
    assert inner.d_inner == 3


def test_find_inner_code_rejects_infeasible():
    rng = np.random.default_rng(24)
    with pytest.raises(InnerCodeSearchError):
        find_inner_code(14, 3, 3, rng)
    with pytest.raises(ValueError):
        find_inner_code(4, 5, 2, rng)


def test_tanner_boundary_shape(small_tanner):
    A = small_tanner.complex
    assert A.n1 == small_tanner.n_bits
    assert A.n0 == small_tanner.n_checks
    assert max(A.boundary.row_weights()) <= small_tanner.delta
    col_z = max(small_tanner.inner.Z.column_weights())
    assert max(A.boundary.column_weights()) <= 2 * col_z
    assert small_tanner.ring_ranks == (3 * 4, 6 * 4 // 2)
    assert expand_to_f2(small_tanner.ring_boundary()) == A.boundary
    assert build_tanner_complex(small_tanner.graph, small_tanner.inner) == A


def test_fast_apply_matches_matrix(small_tanner):
    rng = np.random.default_rng(25)
    A = small_tanner.complex
    for _ in range(10):
        x = BitVec.from_bits(rng.integers(0, 2, A.n1))
        assert small_tanner.syndrome(x) == mat_vec(A.boundary, x)
        y = BitVec.from_bits(rng.integers(0, 2, A.n0))
        assert BitVec.from_bits(small_tanner.coboundary_apply(y.to_bits())) == mat_vec(A.boundary.T, y)
    assert not small_tanner.syndrome(BitVec.zeros(A.n1))


def test_single_edge_syndrome_is_local(small_tanner):
    G = small_tanner.graph
    for e in range(0, G.n_edges, 7):
        s = small_tanner.syndrome(BitVec.unit(G.n_edges, e))
        allowed = set(small_tanner.check_index[G.edge_ends[e]].ravel().tolist())
        assert set(s.support()) <= allowed
        assert 0 < s.weight <= 2 * small_tanner.gamma


def test_random_tanner_code_is_reproducible():
    a = random_tanner_code(4, 6, 4, np.random.default_rng(7), gamma=3, d_min=3, max_lift_tries=3)
    b = random_tanner_code(4, 6, 4, np.random.default_rng(7), gamma=3, d_min=3, max_lift_tries=3)
    assert a.complex == b.complex
    assert a.measured_lambda == b.measured_lambda


def test_repetition_tanner_code():
    code = repetition_tanner_code(5)
    assert code.ring_boundary().to_ints() == [[0b11]]
    assert code.complex.boundary.row_weights() == [2] * 5


def test_degree_mismatch():
    inner = InnerCode(3, 1, BitMat.from_dense([[1, 1, 1]]), 3)
    with pytest.raises(GraphConstructionError):
        TannerCode(lift_graph(BaseGraph(1, 2, (BaseEdge(0, 0, 1, 0, 1),)), 3), inner)


@pytest.mark.slow
def test_large_lift_mixing(large_tanner):
    G = large_tanner.graph
    assert large_tanner.measured_lambda < 1.0
    rng = np.random.default_rng(62)
    for _ in range(100):
        S = rng.choice(G.n_vertices, size=int(rng.integers(1, G.n_vertices + 1)), replace=False)
        assert expander_mixing_holds(G, S, large_tanner.measured_lambda)
