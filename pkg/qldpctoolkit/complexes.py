"""Based chain complexes over F2 and over R_l, their products and code parameters.

A 2-term complex ``A_1 -> A_0`` is a classical code (``ker d``); a 3-term
complex ``C_2 -> C_1 -> C_0`` is a CSS code on ``C_1``. Product spaces put
the ``A_0 (x) B_1`` block first in ``C_1``.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple, Union

from .errors import ChainComplexError, DimensionError, EnumerationBudgetError
from .f2 import BitMat, BitVec, LinearSolver, rank
from .group_algebra import RingElement, RingMatrix, expand_to_f2

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
DEFAULT_ORACLE_BUDGET = 1 << 22

__all__ = [
    "ChainComplex2",
    "ChainComplex3",
    "CodeParams",
    "cochain2",
    "repetition_complex",
    "hypergraph_product",
    "lifted_product",
    "homology_dims",
    "kunneth_dimension",
    "code_params",
    "classical_distance",
    "distance_oracle",
    "logical_representative",
    "coset_witness",
    "coset_check",
    "expansion_check",
    "complex_to_dict",
    "complex_from_dict",
]


class ChainComplex2:
    """``boundary: A_1 -> A_0`` with an optional R_l block form."""

    def __init__(self, boundary: BitMat, ring_boundary: Optional[RingMatrix] = None):
        if ring_boundary is not None and expand_to_f2(ring_boundary) != boundary:
            raise ChainComplexError("ring boundary does not expand to the F2 boundary")
        self.boundary = boundary
        self.ring_boundary = ring_boundary

    @property
    def n1(self) -> int:
        return self.boundary.cols

    @property
    def n0(self) -> int:
        return self.boundary.rows

    @property
    def ell(self) -> int:
        return self.ring_boundary.ell if self.ring_boundary is not None else 1

    @cached_property
    def solver(self) -> LinearSolver:
        return LinearSolver(self.boundary)

    @property
    def locality(self) -> int:
        return self.boundary.locality

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainComplex2):
            return NotImplemented
        return self.boundary == other.boundary and self.ring_boundary == other.ring_boundary

    def __repr__(self) -> str:
        return f"ChainComplex2(n1={self.n1}, n0={self.n0}, ell={self.ell})"


class ChainComplex3:
    """``d2: C_2 -> C_1`` and ``d1: C_1 -> C_0`` with ``d1 d2 = 0`` checked on construction."""

    def __init__(
        self,
        d2: BitMat,
        d1: BitMat,
        ring_d2: Optional[RingMatrix] = None,
        ring_d1: Optional[RingMatrix] = None,
    ):
        if d1.cols != d2.rows:
            raise ChainComplexError(f"d1 has {d1.cols} columns but d2 has {d2.rows} rows")
        if not (d1 @ d2).is_zero():
            raise ChainComplexError("boundary maps do not compose to zero")
        if (ring_d2 is None) != (ring_d1 is None):
            raise ChainComplexError("ring forms must be given for both boundary maps or neither")
        if ring_d2 is not None:
            if ring_d2.ell != ring_d1.ell:
                raise ChainComplexError(f"ring forms disagree on the modulus: {ring_d2.ell} vs {ring_d1.ell}")
            if expand_to_f2(ring_d2) != d2 or expand_to_f2(ring_d1) != d1:
                raise ChainComplexError("ring forms do not expand to the F2 boundary maps")
        self.d2 = d2
        self.d1 = d1
        self.ring_d2 = ring_d2
        self.ring_d1 = ring_d1

    @property
    def n(self) -> int:
        return self.d1.cols

    @property
    def ell(self) -> int:
        return self.ring_d1.ell if self.ring_d1 is not None else 1

    @cached_property
    def d2_solver(self) -> LinearSolver:
        return LinearSolver(self.d2)

    @cached_property
    def d1_solver(self) -> LinearSolver:
        return LinearSolver(self.d1)

    @property
    def locality(self) -> int:
        return max(self.d1.locality, self.d2.locality)

    def dual(self) -> "ChainComplex3":
        """The cochain complex read as a chain complex: ``d2' = d1^T``, ``d1' = d2^T``."""
        ring_d2 = self.ring_d1.conjugate_transpose() if self.ring_d1 is not None else None
        ring_d1 = self.ring_d2.conjugate_transpose() if self.ring_d2 is not None else None
        return ChainComplex3(self.d1.transpose(), self.d2.transpose(), ring_d2, ring_d1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainComplex3):
            return NotImplemented
        return (
            self.d2 == other.d2
            and self.d1 == other.d1
            and self.ring_d2 == other.ring_d2
            and self.ring_d1 == other.ring_d1
        )

    def __repr__(self) -> str:
        return f"ChainComplex3(n2={self.d2.cols}, n1={self.n}, n0={self.d1.rows}, ell={self.ell})"


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int
    d: Optional[int]
    locality: int


def cochain2(A: ChainComplex2) -> ChainComplex2:
    ring = A.ring_boundary.conjugate_transpose() if A.ring_boundary is not None else None
    return ChainComplex2(A.boundary.transpose(), ring)


def repetition_complex(ell: int) -> ChainComplex2:
    """``R_l --(1+X)--> R_l``; its code is the length-l repetition code."""
    if ell < 2:
        raise ValueError(f"repetition complex needs ell >= 2, got {ell}")
    ring = RingMatrix(ell, 1, 1, ((RingElement.from_exponents([0, 1], ell),),))
    return ChainComplex2(expand_to_f2(ring), ring)


def hypergraph_product(A: ChainComplex2, B: ChainComplex2) -> ChainComplex3:
    dA, dB = A.boundary, B.boundary
    d2 = dA.kron(BitMat.identity(B.n1)).vstack(BitMat.identity(A.n1).kron(dB))
    d1 = BitMat.identity(A.n0).kron(dB).hstack(dA.kron(BitMat.identity(B.n0)))
    return ChainComplex3(d2, d1)


def lifted_product(A: ChainComplex2, B: ChainComplex2) -> ChainComplex3:
    """Same block shape as the hypergraph product with tensor products taken over R_l."""
    if A.ring_boundary is None or B.ring_boundary is None:
        raise ChainComplexError("lifted product needs both factors in R_l form")
    rA, rB = A.ring_boundary, B.ring_boundary
    if rA.ell != rB.ell:
        raise ChainComplexError(f"factor moduli differ: {rA.ell} vs {rB.ell}")
    ell = rA.ell
    I = RingMatrix.identity
    ring_d2 = rA.kron(I(rB.cols, ell)).vstack(I(rA.cols, ell).kron(rB))
    ring_d1 = I(rA.rows, ell).kron(rB).hstack(rA.kron(I(rB.rows, ell)))
    return ChainComplex3(expand_to_f2(ring_d2), expand_to_f2(ring_d1), ring_d2, ring_d1)


def homology_dims(A: ChainComplex2) -> Tuple[int, int]:
    """``(dim H_1, dim H_0)`` of a 2-term complex."""
    r = rank(A.boundary)
    return A.n1 - r, A.n0 - r


def kunneth_dimension(A: ChainComplex2, B: ChainComplex2) -> int:
    h1a, h0a = homology_dims(A)
    h1b, h0b = homology_dims(B)
    return h1a * h0b + h0a * h1b


def _dimension(C: ChainComplex3) -> int:
    return C.n - C.d1_solver.rank - C.d2_solver.rank


def _min_weight_outside(
    kernel: List[BitVec], signatures: List[int], budget: int, label: str
) -> Optional[int]:
    """Gray-code walk over span(kernel); min weight among vectors with a nonzero signature."""
    m = len(kernel)
    if m == 0:
        return None
    if (1 << m) > budget:
        raise EnumerationBudgetError(f"{label}: 2^{m} vectors exceed the enumeration budget {budget}")
    vecs = [v.payload for v in kernel]
    cur = 0
    sig = 0
    best: Optional[int] = None
    for idx in range(1, 1 << m):
        bit = (idx & -idx).bit_length() - 1
        cur ^= vecs[bit]
        sig ^= signatures[bit]
        if sig:
            w = cur.bit_count()
            if best is None or w < best:
                best = w
    return best


def _signatures(vectors: List[BitVec], dual_basis: List[BitVec]) -> List[int]:
    out = []
    for v in vectors:
        s = 0
        for j, u in enumerate(dual_basis):
            if (v.payload & u.payload).bit_count() & 1:
                s |= 1 << j
        out.append(s)
    return out


def _side_distance(d2: BitMat, d1: BitMat, budget: int, label: str) -> Optional[int]:
    # v in ker d1 is a boundary iff it is orthogonal to every cocycle in ker d2^T
    cycles = LinearSolver(d1).kernel_basis()
    cocycles = LinearSolver(d2.transpose()).kernel_basis()
    return _min_weight_outside(cycles, _signatures(cycles, cocycles), budget, label)


def distance_oracle(C: ChainComplex3, budget: int = DEFAULT_ORACLE_BUDGET) -> Optional[int]:
    """Exact CSS distance by enumeration; None when the code has no logical qubits."""
    if _dimension(C) == 0:
        return None
    dz = _side_distance(C.d2, C.d1, budget, "cycles")
    dx = _side_distance(C.d1.transpose(), C.d2.transpose(), budget, "cocycles")
    candidates = [d for d in (dz, dx) if d is not None]
    d = min(candidates) if candidates else None
    logger.debug("distance oracle: Z side %s, X side %s", dz, dx)
    return d


def logical_representative(C: ChainComplex3, budget: int = DEFAULT_ORACLE_BUDGET) -> Optional[BitVec]:
    """Some cycle of minimum weight that is not a boundary, or None when k = 0."""
    cycles = LinearSolver(C.d1).kernel_basis()
    cocycles = LinearSolver(C.d2.transpose()).kernel_basis()
    sigs = _signatures(cycles, cocycles)
    m = len(cycles)
    if m == 0 or not any(sigs):
        return None
    if (1 << m) > budget:
        raise EnumerationBudgetError(f"cycles: 2^{m} vectors exceed the enumeration budget {budget}")
    cur = sig = 0
    best: Optional[int] = None
    for idx in range(1, 1 << m):
        bit = (idx & -idx).bit_length() - 1
        cur ^= cycles[bit].payload
        sig ^= sigs[bit]
        if sig and (best is None or cur.bit_count() < best.bit_count()):
            best = cur
    return BitVec(C.n, best)


def classical_distance(A: ChainComplex2, budget: int = DEFAULT_ORACLE_BUDGET) -> Optional[int]:
    """Minimum weight of a nonzero codeword of ``ker d``; None for the zero code."""
    kernel = A.solver.kernel_basis()
    # every nonzero combination counts: give each basis vector its own signature bit
    return _min_weight_outside(kernel, [1 << j for j in range(len(kernel))], budget, "codewords")


def code_params(C: ChainComplex3, oracle_budget: Optional[int] = None) -> CodeParams:
    """``[[n, k, d]]`` and locality; d is attempted only when a budget is given."""
    k = _dimension(C)
    d = None
    if oracle_budget is not None and k > 0:
        try:
            d = distance_oracle(C, oracle_budget)
        except EnumerationBudgetError as exc:
            logger.info("distance left unknown: %s", exc)
    return CodeParams(n=C.n, k=k, d=d, locality=C.locality)


def coset_witness(C: ChainComplex3, c: BitVec, c_hat: BitVec) -> Optional[BitVec]:
    """Some z with ``d2 z = c_hat + c``, or None when the difference is not a boundary."""
    if c.length != C.n or c_hat.length != C.n:
        raise DimensionError(f"vectors must have length {C.n}, got {c.length} and {c_hat.length}")
    return C.d2_solver.solve(c + c_hat)


def coset_check(C: ChainComplex3, c: BitVec, c_hat: BitVec) -> bool:
    return coset_witness(C, c, c_hat) is not None


def expansion_check(A: ChainComplex2, alpha: float, beta: float, budget: int = DEFAULT_ORACLE_BUDGET) -> bool:
    """True iff every c with ``0 < |c| <= alpha N_1`` has ``|d c| >= beta |c|``."""
    if beta <= 0:
        return True
    n = A.n1
    t = min(n, math.floor(alpha * n))
    total = sum(math.comb(n, i) for i in range(1, t + 1))
    if total > budget:
        raise EnumerationBudgetError(f"{total} vectors of weight <= {t} exceed the enumeration budget {budget}")
    columns = A.boundary.transpose().payload
    for size in range(1, t + 1):
        for combo in itertools.combinations(range(n), size):
            acc = 0
            for i in combo:
                acc ^= columns[i]
            if acc.bit_count() < beta * size:
                return False
    return True


def _matrix_to_dict(M: BitMat, ring: Optional[RingMatrix]) -> Dict[str, Any]:
    has_ring = ring is not None
    if ring is None:
        ring = RingMatrix.from_f2(M)
    return {
        "ring": has_ring,
        "ell": ring.ell,
        "rows": ring.rows,
        "cols": ring.cols,
        "entries": ring.sparse_entries(),
    }


def _matrix_from_dict(doc: Dict[str, Any]) -> Tuple[BitMat, Optional[RingMatrix]]:
    ring = RingMatrix.from_sparse_entries(doc["rows"], doc["cols"], doc["ell"], doc["entries"])
    M = expand_to_f2(ring)
    # documents without the flag held a ring form exactly when ell > 1
    return M, (ring if doc.get("ring", doc["ell"] > 1) else None)


def complex_to_dict(C: Union[ChainComplex2, ChainComplex3]) -> Dict[str, Any]:
    """JSON-ready document; ring matrices as sparse ``[row, col, [exponents]]`` entries.

    Complexes without an R_l form are stored over R_1 with ``"ring": false``.
    """
    if isinstance(C, ChainComplex2):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "chain2",
            "boundary": _matrix_to_dict(C.boundary, C.ring_boundary),
        }
    return {
        "format_version": FORMAT_VERSION,
        "kind": "chain3",
        "d2": _matrix_to_dict(C.d2, C.ring_d2),
        "d1": _matrix_to_dict(C.d1, C.ring_d1),
    }


def complex_from_dict(doc: Dict[str, Any]) -> Union[ChainComplex2, ChainComplex3]:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported complex format_version {version!r}")
    kind = doc.get("kind")
    if kind == "chain2":
        return ChainComplex2(*_matrix_from_dict(doc["boundary"]))
    if kind == "chain3":
        d2, ring_d2 = _matrix_from_dict(doc["d2"])
        d1, ring_d1 = _matrix_from_dict(doc["d1"])
        return ChainComplex3(d2, d1, ring_d2, ring_d1)
    raise ValueError(f"unknown complex kind {kind!r}")
