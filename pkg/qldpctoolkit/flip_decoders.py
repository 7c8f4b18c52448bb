"""Noisy-syndrome flip decoders for Tanner chain and cochain complexes.

Both decoders are greedy local searches over single-vertex updates. The state
they drive to zero lives on edges: the mismatch between the two local views of
each edge (chain side) or the residual ``s - delta x`` (cochain side). Each
update toggles the edges at one vertex's ports, so its effect on the potential
is a dot product over at most Delta edges, and a work-list only revisits
vertices next to the last change.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, NamedTuple, Tuple

import numpy as np

from .f2 import BitVec
from .tanner import InnerCode, TannerCode

logger = logging.getLogger(__name__)

__all__ = [
    "SyndromeTable",
    "syndrome_table",
    "FlipTrace",
    "nsdec_chain",
    "nsdec_cochain",
    "decoder_diagnostics",
    "ClassicalDecoder",
    "ErrorBudgets",
    "error_budgets",
    "budgets_from_counts",
]


def _to_int(bits: np.ndarray) -> np.ndarray:
    """Rows of bits to integers, bit g of the result being column g."""
    weights = 1 << np.arange(bits.shape[-1], dtype=np.int64)
    return bits.astype(np.int64) @ weights


@dataclass(frozen=True, eq=False)
class SyndromeTable:
    """Lookup tables for one inner code, built by enumerating all 2^Delta local words.

    ``preimages[s]`` is a minimum-weight word with ``Z w = s`` (s read as a
    Gamma-bit integer); ``kernel_words`` lists the nonzero words of ker Z by
    weight; ``dual_words[j] = Z^T dual_patterns[j]`` over nonzero patterns.
    """

    preimages: np.ndarray
    kernel_words: np.ndarray
    dual_patterns: np.ndarray
    dual_words: np.ndarray

    @classmethod
    def build(cls, inner: InnerCode) -> "SyndromeTable":
        delta, gamma = inner.delta, inner.gamma
        Z = inner.dense.astype(np.int64)
        index = np.arange(1 << delta, dtype=np.int64)
        words = ((index[:, None] >> np.arange(delta)[None, :]) & 1).astype(np.uint8)
        syn = _to_int((words.astype(np.int64) @ Z.T) % 2)
        weight = words.sum(axis=1)
        order = np.lexsort((index, weight))

        _, first = np.unique(syn[order], return_index=True)
        chosen = order[first]
        preimages = np.zeros((1 << gamma, delta), dtype=np.uint8)
        preimages[syn[chosen]] = words[chosen]
        if len(chosen) != 1 << gamma:
            raise RuntimeError(f"inner check reaches only {len(chosen)} of {1 << gamma} syndromes")

        kernel_order = order[syn[order] == 0]
        kernel_words = words[kernel_order[1:]]  # drop the zero word

        pidx = np.arange(1, 1 << gamma, dtype=np.int64)
        patterns = ((pidx[:, None] >> np.arange(gamma)[None, :]) & 1).astype(np.uint8)
        dual_words = ((patterns.astype(np.int64) @ Z) % 2).astype(np.uint8)

        table = cls(preimages, kernel_words, patterns, dual_words)
        table.verify(inner)
        return table

    def verify(self, inner: InnerCode) -> None:
        Z = inner.dense.astype(np.int64)
        back = _to_int((self.preimages.astype(np.int64) @ Z.T) % 2)
        if not np.array_equal(back, np.arange(len(self.preimages))):
            raise RuntimeError("syndrome table preimage does not reproduce its syndrome")
        if np.any((self.kernel_words.astype(np.int64) @ Z.T) % 2):
            raise RuntimeError("syndrome table kernel word is not in ker Z")


@lru_cache(maxsize=32)
def syndrome_table(inner: InnerCode) -> SyndromeTable:
    return SyndromeTable.build(inner)


@dataclass(frozen=True)
class FlipTrace:
    flips: int
    initial_potential: int
    final_potential: int


class _LocalSearch:
    """Greedy single-vertex flips over edge-valued state.

    ``toggles[j]`` says which of a vertex's Delta ports candidate j flips;
    ``payload[j]`` is what gets XORed into that vertex's local variable.
    """

    def __init__(self, code: TannerCode, toggles: np.ndarray, payload: np.ndarray):
        self.code = code
        self.toggles = toggles.astype(np.int64)
        self.payload = payload
        self._loop_cache: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}

    def _local(self, v: int) -> Tuple[np.ndarray, np.ndarray]:
        ports = self.code.graph.port_edge[v]
        if not self.code.graph.has_loop[v]:
            return ports, self.toggles
        cached = self._loop_cache.get(v)
        if cached is None:
            # a self-loop sits on two ports; its net toggle is the parity of both
            edges, slot = np.unique(ports, return_inverse=True)
            proj = np.zeros((len(ports), len(edges)), dtype=np.int64)
            proj[np.arange(len(ports)), slot] = 1
            cached = (edges, (self.toggles @ proj) % 2)
            self._loop_cache[v] = cached
        return cached

    def run(self, state: np.ndarray, x: np.ndarray) -> FlipTrace:
        graph = self.code.graph
        initial = int(state.sum())
        touched = np.unique(graph.edge_ends[state.astype(bool)].ravel())
        queue = deque(int(v) for v in touched)
        queued = np.zeros(graph.n_vertices, dtype=bool)
        queued[touched] = True
        flips = 0
        while queue:
            v = queue.popleft()
            queued[v] = False
            edges, T = self._local(v)
            gain = T @ (2 * state[edges].astype(np.int64) - 1)
            # steepest flip; argmax breaks ties toward the earliest candidate
            best = int(np.argmax(gain))
            if gain[best] <= 0:
                continue
            state[edges] ^= T[best].astype(state.dtype)
            x[v] ^= self.payload[best]
            flips += 1
            for w in (v, *graph.port_peer[v].tolist()):
                if not queued[w]:
                    queued[w] = True
                    queue.append(w)
        return FlipTrace(flips, initial, int(state.sum()))


def _chain_decode(code: TannerCode, s: np.ndarray) -> Tuple[np.ndarray, FlipTrace]:
    table = syndrome_table(code.inner)
    graph = code.graph
    sv = np.asarray(s, dtype=np.uint8)[code.check_index]
    x = table.preimages[_to_int(sv)].copy()
    ends, ports = graph.edge_ends, graph.edge_ports
    mismatch = x[ends[:, 0], ports[:, 0]] ^ x[ends[:, 1], ports[:, 1]]
    trace = _LocalSearch(code, table.kernel_words, table.kernel_words).run(mismatch, x)
    left = x[ends[:, 0], ports[:, 0]]
    right = x[ends[:, 1], ports[:, 1]]
    estimate = np.where(left == right, left, 0).astype(np.uint8)
    return estimate, trace


def _cochain_decode(code: TannerCode, s: np.ndarray) -> Tuple[np.ndarray, FlipTrace]:
    table = syndrome_table(code.inner)
    residual = np.asarray(s, dtype=np.uint8).copy()
    x = np.zeros((code.n_vertices, code.gamma), dtype=np.uint8)
    trace = _LocalSearch(code, table.dual_words, table.dual_patterns).run(residual, x)
    estimate = np.zeros(code.n_checks, dtype=np.uint8)
    estimate[code.check_index] = x
    return estimate, trace


def nsdec_chain(code: TannerCode, s: BitVec) -> BitVec:
    """Decode a noisy chain syndrome in A_0 to an edge estimate in A_1."""
    if s.length != code.n_checks:
        raise ValueError(f"syndrome has length {s.length}, expected {code.n_checks}")
    estimate, _ = _chain_decode(code, s.to_bits())
    return BitVec.from_bits(estimate)


def nsdec_cochain(code: TannerCode, s: BitVec) -> BitVec:
    """Decode a noisy cochain syndrome in A^1 = F2^E to an estimate in A^0."""
    if s.length != code.n_bits:
        raise ValueError(f"syndrome has length {s.length}, expected {code.n_bits}")
    estimate, _ = _cochain_decode(code, s.to_bits())
    return BitVec.from_bits(estimate)


def decoder_diagnostics(code: TannerCode, side: str, s: BitVec) -> FlipTrace:
    if side == "chain":
        return _chain_decode(code, s.to_bits())[1]
    if side == "cochain":
        return _cochain_decode(code, s.to_bits())[1]
    raise ValueError(f"side must be 'chain' or 'cochain', got {side!r}")


def _reflection(n: int, ell: int) -> np.ndarray:
    idx = np.arange(n)
    return (idx // ell) * ell + (-(idx % ell)) % ell


class ClassicalDecoder:
    """A noisy-syndrome decodable view of one side of a Tanner complex.

    ``side="chain"`` decodes ``d: F2^E -> F2^{V x Gamma}`` with gamma = 2 Delta;
    ``side="cochain"`` decodes ``d^T`` with gamma = 4 Delta. With ``reflect=True``
    both the map and the decoder are conjugated by ``i -> -i`` inside every
    length-l block.
    """

    def __init__(self, code: TannerCode, side: str = "chain", reflect: bool = False):
        if side not in ("chain", "cochain"):
            raise ValueError(f"side must be 'chain' or 'cochain', got {side!r}")
        self.code = code
        self.side = side
        self.reflect = reflect
        if side == "chain":
            self.n_bits, self.n_checks = code.n_bits, code.n_checks
            self._apply: Callable[[np.ndarray], np.ndarray] = code.boundary_apply
            self._decode = _chain_decode
            self.gamma = 2 * code.delta
        else:
            self.n_bits, self.n_checks = code.n_checks, code.n_bits
            self._apply = code.coboundary_apply
            self._decode = _cochain_decode
            self.gamma = 4 * code.delta
        if reflect:
            self._r_bits = _reflection(self.n_bits, code.ell)
            self._r_checks = _reflection(self.n_checks, code.ell)

    @property
    def ell(self) -> int:
        return self.code.ell

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.reflect:
            return self._apply(np.asarray(x)[self._r_bits])[self._r_checks]
        return self._apply(x)

    def decode(self, s: np.ndarray) -> np.ndarray:
        if self.reflect:
            return self._decode(self.code, np.asarray(s)[self._r_checks])[0][self._r_bits]
        return self._decode(self.code, s)[0]

    def __repr__(self) -> str:
        return f"ClassicalDecoder(side={self.side!r}, reflect={self.reflect}, gamma={self.gamma})"


class ErrorBudgets(NamedTuple):
    e0: int
    e1: int
    e0_co: int
    e1_co: int


def budgets_from_counts(n_vertices: int, delta: int, lam: float) -> ErrorBudgets:
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    base = lam * n_vertices
    return ErrorBudgets(
        e0=math.floor(base / (2 * (delta + 1))),
        e1=math.floor(base / (4 * (delta + 1))),
        e0_co=math.floor(base / (2 * (delta + 1))),
        e1_co=math.floor(base / 2),
    )


def error_budgets(code: TannerCode, lam: float) -> ErrorBudgets:
    """Admissible syndrome-error and code-error weights for both flip decoders."""
    budgets = budgets_from_counts(code.n_vertices, code.delta, lam)
    if lam >= code.inner.d_inner / (16 * code.delta):
        logger.info(
            "lambda=%.4f is outside the proven regime lambda < d_min/(16 Delta)=%.4f",
            lam,
            code.inner.d_inner / (16 * code.delta),
        )
    return budgets
