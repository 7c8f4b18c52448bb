"""Expander Tanner codes on random abelian lifts.

The classical complex is ``A_1 = F2^E -> A_0 = F2^{V x [Gamma]}`` with boundary
``(I (x) Z) M``, where M sends an edge to the two (vertex, port) slots it
occupies and Z is the inner parity check applied at every vertex.

Index layout (kept compatible with the R_l block form):
    lifted vertex (u0, i)   -> u0 * ell + i
    lifted edge   (e0, i)   -> e0 * ell + i
    check (g at (u0, i))    -> (u0 * Gamma + g) * ell + i
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .complexes import ChainComplex2
from .errors import EnumerationBudgetError, GraphConstructionError, InnerCodeSearchError
from .f2 import BitMat, BitVec, LinearSolver
from .group_algebra import RingMatrix

logger = logging.getLogger(__name__)

SPECTRAL_BUDGET = 4096
MAX_INNER_DELTA = 20


@dataclass(frozen=True)
class BaseEdge:
    u: int
    v: int
    label: int
    port_u: int
    port_v: int

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class BaseGraph:
    """Delta-regular base multigraph with edge labels in Z/lZ and port numbers.

    Each edge stores the label ``L(u, v)``; reading it from the other end gives
    ``L(v, u) = -L(u, v)``. A loop occupies two ports of its vertex.
    """

    v0: int
    delta: int
    edges: Tuple[BaseEdge, ...]

    def __post_init__(self):
        if self.v0 < 1:
            raise GraphConstructionError(f"base graph needs at least one vertex, got {self.v0}")
        ports: List[set] = [set() for _ in range(self.v0)]
        for e in self.edges:
            for w, p in ((e.u, e.port_u), (e.v, e.port_v)):
                if not 0 <= w < self.v0:
                    raise GraphConstructionError(f"edge endpoint {w} outside [0, {self.v0})")
                if not 0 <= p < self.delta:
                    raise GraphConstructionError(f"port {p} outside [0, {self.delta})")
                if p in ports[w]:
                    raise GraphConstructionError(f"port {p} used twice at vertex {w}")
                ports[w].add(p)
        for w, used in enumerate(ports):
            if len(used) != self.delta:
                raise GraphConstructionError(f"vertex {w} has degree {len(used)}, expected {self.delta}")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def oriented_label(self, index: int, start: int, ell: int) -> int:
        """Label of edge ``index`` read from endpoint ``start``."""
        e = self.edges[index]
        if start == e.u:
            return e.label % ell
        if start == e.v:
            return (-e.label) % ell
        raise GraphConstructionError(f"vertex {start} is not an endpoint of edge {index}")

    def degree_histogram(self) -> List[int]:
        deg = [0] * self.v0
        for e in self.edges:
            deg[e.u] += 1
            deg[e.v] += 1
        return deg


def random_base_graph(v0: int, delta: int, ell: int, rng: np.random.Generator) -> BaseGraph:
    """Union of ``delta // 2`` random permutation 2-factors, plus a perfect matching when delta is odd.

    Labels are uniform in Z/lZ, except that loops draw from the nonzero residues
    (when l >= 2) so they never lift to self-loops. Ports are a random bijection
    per vertex.
    """
    if delta < 2:
        raise GraphConstructionError(f"degree must be at least 2, got {delta}")
    if v0 < 1 or (v0 * delta) % 2:
        raise GraphConstructionError(f"no {delta}-regular graph on {v0} vertices")
    if ell < 1:
        raise GraphConstructionError(f"lift order must be positive, got {ell}")

    pairs: List[Tuple[int, int]] = []
    for _ in range(delta // 2):
        perm = rng.permutation(v0)
        pairs.extend((u, int(perm[u])) for u in range(v0))
    if delta % 2:
        order = rng.permutation(v0)
        pairs.extend((int(order[k]), int(order[k + 1])) for k in range(0, v0, 2))

    port_order = [list(rng.permutation(delta)) for _ in range(v0)]
    cursor = [0] * v0

    def next_port(w: int) -> int:
        p = int(port_order[w][cursor[w]])
        cursor[w] += 1
        return p

    edges = []
    for u, v in pairs:
        if u == v and ell >= 2:
            label = int(rng.integers(1, ell))
        else:
            label = int(rng.integers(ell))
        edges.append(BaseEdge(u, v, label, next_port(u), next_port(v)))
    return BaseGraph(v0, delta, tuple(edges))


@dataclass(frozen=True, eq=False)
class LiftedGraph:
    base: BaseGraph
    ell: int
    edge_ends: np.ndarray = field(repr=False)  # (E, 2) lifted vertices
    edge_ports: np.ndarray = field(repr=False)  # (E, 2) ports at those ends
    port_edge: np.ndarray = field(repr=False)  # (V, delta) edge at each port
    port_peer: np.ndarray = field(repr=False)  # (V, delta) vertex across that edge
    port_peer_port: np.ndarray = field(repr=False)
    has_loop: np.ndarray = field(repr=False)  # (V,) vertex carries a self-loop

    @property
    def delta(self) -> int:
        return self.base.delta

    @property
    def n_vertices(self) -> int:
        return self.base.v0 * self.ell

    @property
    def n_edges(self) -> int:
        return self.base.n_edges * self.ell


def lift_graph(base: BaseGraph, ell: int) -> LiftedGraph:
    """Vertices ``V0 x Z/lZ``; base edge (u, v, L) gives ``{(u, i), (v, i + L)}`` for every i."""
    if ell < 1:
        raise GraphConstructionError(f"lift order must be positive, got {ell}")
    m = base.n_edges
    n_vertices = base.v0 * ell
    i = np.arange(ell)
    u = np.array([e.u for e in base.edges], dtype=np.int64)
    v = np.array([e.v for e in base.edges], dtype=np.int64)
    labels = np.array([e.label % ell for e in base.edges], dtype=np.int64)
    pu = np.array([e.port_u for e in base.edges], dtype=np.int64)
    pv = np.array([e.port_v for e in base.edges], dtype=np.int64)

    a = (u[:, None] * ell + i[None, :]).ravel()
    b = (v[:, None] * ell + (i[None, :] + labels[:, None]) % ell).ravel()
    edge_ends = np.stack([a, b], axis=1)
    edge_ports = np.stack([np.repeat(pu, ell), np.repeat(pv, ell)], axis=1)

    edges = np.arange(m * ell)
    port_edge = np.full((n_vertices, base.delta), -1, dtype=np.int64)
    port_peer = np.full_like(port_edge, -1)
    port_peer_port = np.full_like(port_edge, -1)
    port_edge[a, edge_ports[:, 0]] = edges
    port_edge[b, edge_ports[:, 1]] = edges
    port_peer[a, edge_ports[:, 0]] = b
    port_peer[b, edge_ports[:, 1]] = a
    port_peer_port[a, edge_ports[:, 0]] = edge_ports[:, 1]
    port_peer_port[b, edge_ports[:, 1]] = edge_ports[:, 0]
    if np.any(port_edge < 0):
        raise GraphConstructionError("lifted graph left a port unassigned")
    has_loop = np.zeros(n_vertices, dtype=bool)
    has_loop[a[a == b]] = True

    return LiftedGraph(base, ell, edge_ends, edge_ports, port_edge, port_peer, port_peer_port, has_loop)


def adjacency_matrix(G: LiftedGraph) -> np.ndarray:
    """Edge-count matrix W_G; a self-loop adds 2 on the diagonal so rows sum to delta."""
    W = np.zeros((G.n_vertices, G.n_vertices), dtype=np.float64)
    a, b = G.edge_ends[:, 0], G.edge_ends[:, 1]
    np.add.at(W, (a, b), 1.0)
    np.add.at(W, (b, a), 1.0)
    return W


def second_eigenvalue(W: np.ndarray, delta: int) -> float:
    """Second largest absolute eigenvalue of ``W / delta``."""
    if W.shape[0] < 2:
        return 0.0
    eig = np.linalg.eigvalsh(W / float(delta))
    mags = np.sort(np.abs(eig))[::-1]
    return float(min(1.0, mags[1]))


def spectral_expansion(G: LiftedGraph, budget: int = SPECTRAL_BUDGET) -> float:
    if G.n_vertices > budget:
        raise EnumerationBudgetError(f"{G.n_vertices} vertices exceed the dense eigensolve budget {budget}")
    return second_eigenvalue(adjacency_matrix(G), G.delta)


def expander_mixing_holds(G: LiftedGraph, S: Sequence[int], lam: Optional[float] = None, tol: float = 1e-9) -> bool:
    """Check ``W_G(S, S) <= (lambda + |S|/|V|) * delta * |S|`` for one vertex set."""
    if lam is None:
        lam = spectral_expansion(G)
    ind = np.zeros(G.n_vertices, dtype=np.float64)
    ind[np.asarray(list(S), dtype=np.int64)] = 1.0
    size = float(ind.sum())
    inside = float(ind @ adjacency_matrix(G) @ ind)
    return inside <= (lam + size / G.n_vertices) * G.delta * size + tol


@dataclass(frozen=True)
class InnerCode:
    delta: int
    gamma: int
    Z: BitMat
    d_inner: int

    def __post_init__(self):
        if self.Z.shape != (self.gamma, self.delta):
            raise InnerCodeSearchError(f"inner check has shape {self.Z.shape}, expected {(self.gamma, self.delta)}")

    @cached_property
    def dense(self) -> np.ndarray:
        return self.Z.to_dense()


def _span_min_weight(basis: np.ndarray) -> float:
    """Minimum nonzero weight in the row span; infinity for the zero code."""
    k = basis.shape[0]
    if k == 0:
        return math.inf
    coeffs = (np.arange(1, 1 << k)[:, None] >> np.arange(k)[None, :]) & 1
    words = (coeffs @ basis.astype(np.int64)) % 2
    return float(words.sum(axis=1).min())


def inner_distances(Z: np.ndarray) -> Tuple[float, float]:
    """``(d(ker Z), d(im Z^T))`` by enumeration."""
    kernel = LinearSolver(BitMat.from_dense(Z)).kernel_basis()
    kernel_rows = np.array([v.to_bits() for v in kernel], dtype=np.uint8).reshape(len(kernel), Z.shape[1])
    return _span_min_weight(kernel_rows), _span_min_weight(Z)


def _sphere(n: int, radius: int) -> int:
    return sum(math.comb(n, i) for i in range(radius + 1))


def _check_feasible(delta: int, gamma: int, d_min: int) -> None:
    t = (d_min - 1) // 2
    k_ker, k_im = delta - gamma, gamma
    problems = []
    if k_ker > 0:
        if _sphere(delta, t) > 2 ** (delta - k_ker):
            problems.append(f"[{delta},{k_ker}] kernel code violates the sphere-packing bound at distance {d_min}")
        if d_min > delta - k_ker + 1:
            problems.append(f"[{delta},{k_ker}] kernel code violates the Singleton bound at distance {d_min}")
    if k_im > 0:
        if _sphere(delta, t) > 2 ** (delta - k_im):
            problems.append(f"[{delta},{k_im}] image code violates the sphere-packing bound at distance {d_min}")
        if d_min > delta - k_im + 1:
            problems.append(f"[{delta},{k_im}] image code violates the Singleton bound at distance {d_min}")
    if problems:
        raise InnerCodeSearchError("; ".join(problems))


def find_inner_code(
    delta: int,
    gamma: int,
    d_min: int,
    rng: np.random.Generator,
    max_tries: int = 100_000,
) -> InnerCode:
    """Rejection-sample a full-rank Gamma x Delta check Z with both ker Z and im Z^T at distance >= d_min.

    Candidate columns are drawn nonzero (and pairwise distinct when d_min >= 3
    and enough nonzero columns exist), since any Z violating that already has a
    kernel word of weight 1 or 2.
    """
    if not 1 <= gamma <= delta:
        raise ValueError(f"need 1 <= gamma <= delta, got gamma={gamma}, delta={delta}")
    if delta > MAX_INNER_DELTA:
        raise ValueError(f"delta={delta} is too large to enumerate (max {MAX_INNER_DELTA})")
    if d_min < 1:
        raise ValueError(f"d_min must be positive, got {d_min}")
    _check_feasible(delta, gamma, d_min)

    n_nonzero = (1 << gamma) - 1
    distinct = d_min >= 3 and n_nonzero >= delta
    shifts = np.arange(gamma)
    for attempt in range(1, max_tries + 1):
        if d_min >= 2:
            cols = rng.choice(np.arange(1, n_nonzero + 1), size=delta, replace=not distinct)
            Z = ((cols[None, :] >> shifts[:, None]) & 1).astype(np.uint8)
        else:
            Z = rng.integers(0, 2, size=(gamma, delta), dtype=np.uint8)
        if LinearSolver(BitMat.from_dense(Z.T)).rank != gamma:
            continue
        d_ker, d_im = inner_distances(Z)
        if d_ker >= d_min and d_im >= d_min:
            logger.info("inner code [%d, %d] found after %d tries (d_ker=%s, d_im=%s)", delta, delta - gamma, attempt, d_ker, d_im)
            return InnerCode(delta, gamma, BitMat.from_dense(Z), d_min)
    raise InnerCodeSearchError(f"no inner code with delta={delta}, gamma={gamma}, d_min={d_min} in {max_tries} tries")


class TannerCode:
    """A lifted graph with an inner code at every vertex, plus the adjacency tables the flip decoders walk."""

    def __init__(self, graph: LiftedGraph, inner: InnerCode, measured_lambda: Optional[float] = None):
        if graph.delta != inner.delta:
            raise GraphConstructionError(f"graph degree {graph.delta} does not match inner code length {inner.delta}")
        self.graph = graph
        self.inner = inner
        self.measured_lambda = measured_lambda
        ell, gamma = graph.ell, inner.gamma
        verts = np.arange(graph.n_vertices)
        self.check_index = ((verts // ell)[:, None] * gamma + np.arange(gamma)[None, :]) * ell + (verts % ell)[:, None]

    @property
    def ell(self) -> int:
        return self.graph.ell

    @property
    def delta(self) -> int:
        return self.inner.delta

    @property
    def gamma(self) -> int:
        return self.inner.gamma

    @property
    def n_vertices(self) -> int:
        return self.graph.n_vertices

    @property
    def n_bits(self) -> int:
        return self.graph.n_edges

    @property
    def n_checks(self) -> int:
        return self.graph.n_vertices * self.inner.gamma

    @property
    def ring_ranks(self) -> Tuple[int, int]:
        """``(n0, n1)`` as R_l ranks."""
        return self.gamma * self.graph.base.v0, self.graph.base.n_edges

    def boundary_apply(self, bits: np.ndarray) -> np.ndarray:
        local = np.asarray(bits, dtype=np.uint8)[self.graph.port_edge]
        syn = (local.astype(np.int64) @ self.inner.dense.T.astype(np.int64)) % 2
        out = np.zeros(self.n_checks, dtype=np.uint8)
        out[self.check_index] = syn
        return out

    def coboundary_apply(self, checks: np.ndarray) -> np.ndarray:
        xv = np.asarray(checks, dtype=np.int64)[self.check_index]
        w = (xv @ self.inner.dense.astype(np.int64)) % 2
        ends, ports = self.graph.edge_ends, self.graph.edge_ports
        return (w[ends[:, 0], ports[:, 0]] ^ w[ends[:, 1], ports[:, 1]]).astype(np.uint8)

    def syndrome(self, error: BitVec) -> BitVec:
        return BitVec.from_bits(self.boundary_apply(error.to_bits()))

    def ring_boundary(self) -> RingMatrix:
        base, Z = self.graph.base, self.inner.dense
        ell, gamma = self.ell, self.gamma
        grid = [[0] * base.n_edges for _ in range(base.v0 * gamma)]
        for e0, e in enumerate(base.edges):
            back = (-e.label) % ell
            for g in range(gamma):
                if Z[g, e.port_u]:
                    grid[e.u * gamma + g][e0] ^= 1
                if Z[g, e.port_v]:
                    grid[e.v * gamma + g][e0] ^= 1 << back
        return RingMatrix.from_ints(grid, ell)

    @cached_property
    def complex(self) -> ChainComplex2:
        D = np.zeros((self.n_checks, self.n_bits), dtype=np.int64)
        Z = self.inner.dense.astype(np.int64)
        edges = np.arange(self.n_bits)
        for side in (0, 1):
            verts = self.graph.edge_ends[:, side]
            ports = self.graph.edge_ports[:, side]
            rows = self.check_index[verts]  # (E, gamma)
            np.add.at(D, (rows, np.broadcast_to(edges[:, None], rows.shape)), Z[:, ports].T)
        return ChainComplex2(BitMat.from_dense(D % 2), self.ring_boundary())

    def __repr__(self) -> str:
        return (
            f"TannerCode(v0={self.graph.base.v0}, delta={self.delta}, gamma={self.gamma}, "
            f"ell={self.ell}, lambda={self.measured_lambda})"
        )


def build_tanner_complex(G: LiftedGraph, inner: InnerCode) -> ChainComplex2:
    return TannerCode(G, inner).complex


def random_tanner_code(
    v0: int,
    delta: int,
    ell: int,
    rng: np.random.Generator,
    inner: Optional[InnerCode] = None,
    gamma: int = 4,
    d_min: int = 3,
    lambda_target: float = 0.7,
    max_lift_tries: int = 20,
    max_inner_tries: int = 100_000,
) -> TannerCode:
    """Resample base graphs and lifts until the measured lambda meets the target.

    When every try misses the target the best lift seen is kept.
    """
    if inner is None:
        inner = find_inner_code(delta, gamma, d_min, rng, max_inner_tries)
    best: Optional[Tuple[float, LiftedGraph]] = None
    for attempt in range(1, max_lift_tries + 1):
        lifted = lift_graph(random_base_graph(v0, delta, ell, rng), ell)
        lam = spectral_expansion(lifted)
        logger.debug("lift attempt %d: lambda=%.4f", attempt, lam)
        if best is None or lam < best[0]:
            best = (lam, lifted)
        if lam <= lambda_target:
            break
    lam, lifted = best
    if lam > lambda_target:
        logger.warning(
            "no lift reached lambda <= %.3f in %d tries; keeping best lambda=%.4f", lambda_target, max_lift_tries, lam
        )
    else:
        logger.info("lift accepted with lambda=%.4f", lam)
    return TannerCode(lifted, inner, lam)


def repetition_tanner_code(ell: int) -> TannerCode:
    """The length-l cycle code as a Tanner code: one vertex, one loop, Z = [1 1].

    Its ring boundary is exactly ``1 + X``.
    """
    if ell < 2:
        raise ValueError(f"repetition code needs ell >= 2, got {ell}")
    base = BaseGraph(1, 2, (BaseEdge(0, 0, ell - 1, 0, 1),))
    inner = InnerCode(2, 1, BitMat.from_dense([[1, 1]]), 2)
    lifted = lift_graph(base, ell)
    lam = spectral_expansion(lifted) if lifted.n_vertices <= SPECTRAL_BUDGET else None
    return TannerCode(lifted, inner, lam)
