"""The cyclic group algebra R_l = F2[X]/(X^l - 1) and free modules over it.

Module elements use the (h, i) component convention: basis element (h, i) is
``alpha_h X^{-i}``, so multiplying by ``X^k`` moves component ``i + k`` into
slot ``i``. Flattening to F2 puts ``h`` outer and ``i`` inner, which keeps
every circulant block contiguous.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .errors import DimensionError
from .f2 import BitMat, BitVec, iter_bits

__all__ = [
    "RingElement",
    "ModuleElement",
    "RingMatrix",
    "ring_mul",
    "conjugate",
    "prefix_multiplier",
    "apply",
    "expand_to_f2",
    "repetition_factor_solve",
    "repetition_rows_solve",
    "solve_repetition_factor",
]


def _check_ell(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"modulus mismatch: {a} vs {b}")


def _rotate(x: int, k: int, ell: int) -> int:
    k %= ell
    if k == 0:
        return x
    mask = (1 << ell) - 1
    return ((x << k) | (x >> (ell - k))) & mask


@dataclass(frozen=True)
class RingElement:
    ell: int
    coeffs: BitVec

    def __post_init__(self):
        if self.ell < 1:
            raise DimensionError(f"modulus must be positive, got {self.ell}")
        if self.coeffs.length != self.ell:
            raise DimensionError(f"expected {self.ell} coefficients, got {self.coeffs.length}")

    @classmethod
    def zero(cls, ell: int) -> "RingElement":
        return cls(ell, BitVec.zeros(ell))

    @classmethod
    def one(cls, ell: int) -> "RingElement":
        return cls.monomial(0, ell)

    @classmethod
    def monomial(cls, k: int, ell: int) -> "RingElement":
        return cls(ell, BitVec(ell, 1 << (k % ell)))

    @classmethod
    def from_int(cls, value: int, ell: int) -> "RingElement":
        return cls(ell, BitVec(ell, value))

    @classmethod
    def from_exponents(cls, exponents: Iterable[int], ell: int) -> "RingElement":
        value = 0
        for k in exponents:
            value ^= 1 << (int(k) % ell)
        return cls(ell, BitVec(ell, value))

    @property
    def value(self) -> int:
        return self.coeffs.payload

    def exponents(self) -> List[int]:
        return self.coeffs.support()

    @property
    def weight(self) -> int:
        return self.coeffs.weight

    def is_zero(self) -> bool:
        return self.value == 0

    def __add__(self, other: "RingElement") -> "RingElement":
        _check_ell(self.ell, other.ell)
        return RingElement(self.ell, self.coeffs + other.coeffs)

    def __mul__(self, other: "RingElement") -> "RingElement":
        return ring_mul(self, other)

    def conjugate(self) -> "RingElement":
        return conjugate(self)

    def __str__(self) -> str:
        terms = []
        for k in self.exponents():
            terms.append("1" if k == 0 else ("X" if k == 1 else f"X^{k}"))
        return "+".join(terms) or "0"


def ring_mul(f: RingElement, g: RingElement) -> RingElement:
    """Cyclic convolution over F2."""
    _check_ell(f.ell, g.ell)
    acc = 0
    for k in iter_bits(f.value):
        acc ^= _rotate(g.value, k, f.ell)
    return RingElement(f.ell, BitVec(f.ell, acc))


def conjugate(f: RingElement) -> RingElement:
    """``f(X)^* = f(X^{l-1})``: the coefficient of X^i moves to X^{-i}."""
    return RingElement.from_exponents(((-k) % f.ell for k in f.exponents()), f.ell)


def prefix_multiplier(k: int, ell: int) -> RingElement:
    """``1 + X + ... + X^{k-1}``; the empty sum for k = 0."""
    if not 0 <= k <= ell:
        raise ValueError(f"prefix length {k} outside [0, {ell}]")
    return RingElement(ell, BitVec(ell, (1 << k) - 1))


class ModuleElement:
    """Element of the free module R_l^n stored as an (n, l) uint8 array."""

    __slots__ = ("ell", "n", "coeffs")

    def __init__(self, ell: int, n: int, coeffs: Optional[np.ndarray] = None):
        if coeffs is None:
            coeffs = np.zeros((n, ell), dtype=np.uint8)
        arr = np.asarray(coeffs, dtype=np.uint8)
        if arr.shape != (n, ell):
            raise DimensionError(f"expected coefficient shape {(n, ell)}, got {arr.shape}")
        self.ell = ell
        self.n = n
        self.coeffs = arr & 1

    @classmethod
    def zeros(cls, ell: int, n: int) -> "ModuleElement":
        return cls(ell, n)

    @classmethod
    def from_bitvec(cls, v: BitVec, ell: int) -> "ModuleElement":
        if v.length % ell:
            raise DimensionError(f"length {v.length} is not a multiple of {ell}")
        n = v.length // ell
        return cls(ell, n, v.to_bits().reshape(n, ell))

    @classmethod
    def from_components(cls, components: Sequence[RingElement]) -> "ModuleElement":
        if not components:
            raise DimensionError("at least one component is required")
        ell = components[0].ell
        rows = []
        for f in components:
            _check_ell(ell, f.ell)
            # coefficient of X^k in component h is a_{h,-k}
            rows.append(np.roll(f.coeffs.to_bits()[::-1], 1))
        return cls(ell, len(components), np.stack(rows))

    def to_bitvec(self) -> BitVec:
        return BitVec.from_bits(self.coeffs.ravel())

    def flatten(self) -> np.ndarray:
        return self.coeffs.ravel().copy()

    def get(self, h: int, i: int) -> int:
        return int(self.coeffs[h, i % self.ell])

    def component(self, h: int) -> RingElement:
        row = self.coeffs[h]
        return RingElement(self.ell, BitVec.from_bits(np.roll(row[::-1], 1)))

    @property
    def weight(self) -> int:
        return int(self.coeffs.sum())

    def shift(self, k: int) -> "ModuleElement":
        """Left multiplication by X^k: ``(X^k a)_{h,i} = a_{h,i+k}``."""
        return ModuleElement(self.ell, self.n, np.roll(self.coeffs, -k, axis=1))

    def scale(self, f: RingElement) -> "ModuleElement":
        _check_ell(self.ell, f.ell)
        out = np.zeros_like(self.coeffs)
        for k in f.exponents():
            out ^= np.roll(self.coeffs, -k, axis=1)
        return ModuleElement(self.ell, self.n, out)

    def conjugate(self) -> "ModuleElement":
        """Reindex ``i -> -i``; takes multiplication by f to multiplication by f*."""
        idx = (-np.arange(self.ell)) % self.ell
        return ModuleElement(self.ell, self.n, self.coeffs[:, idx])

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        _check_ell(self.ell, other.ell)
        if self.n != other.n:
            raise DimensionError(f"rank mismatch: {self.n} vs {other.n}")
        return ModuleElement(self.ell, self.n, self.coeffs ^ other.coeffs)

    __sub__ = __add__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return self.ell == other.ell and self.n == other.n and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.ell, self.n, self.coeffs.tobytes()))

    def __repr__(self) -> str:
        return f"ModuleElement(ell={self.ell}, n={self.n}, weight={self.weight})"


@dataclass(frozen=True)
class RingMatrix:
    ell: int
    rows: int
    cols: int
    entries: tuple[tuple[RingElement, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionError(f"entry grid does not match shape {(self.rows, self.cols)}")
        for row in self.entries:
            for f in row:
                _check_ell(self.ell, f.ell)

    @classmethod
    def from_ints(cls, grid: Sequence[Sequence[int]], ell: int) -> "RingMatrix":
        entries = tuple(tuple(RingElement.from_int(int(v), ell) for v in row) for row in grid)
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        return cls(ell, rows, cols, entries)

    @classmethod
    def zeros(cls, rows: int, cols: int, ell: int) -> "RingMatrix":
        return cls.from_ints([[0] * cols for _ in range(rows)], ell)

    @classmethod
    def identity(cls, n: int, ell: int) -> "RingMatrix":
        return cls.from_ints([[1 if r == c else 0 for c in range(n)] for r in range(n)], ell)

    @classmethod
    def from_f2(cls, M: BitMat) -> "RingMatrix":
        """View an F2 matrix as a matrix over R_1."""
        return cls.from_ints(M.to_dense().tolist(), 1)

    def to_ints(self) -> List[List[int]]:
        return [[f.value for f in row] for row in self.entries]

    def __getitem__(self, rc: tuple[int, int]) -> RingElement:
        r, c = rc
        return self.entries[r][c]

    def transpose(self) -> "RingMatrix":
        return RingMatrix(
            self.ell,
            self.cols,
            self.rows,
            tuple(tuple(self.entries[r][c] for r in range(self.rows)) for c in range(self.cols)),
        )

    def conjugate(self) -> "RingMatrix":
        return RingMatrix(self.ell, self.rows, self.cols, tuple(tuple(conjugate(f) for f in row) for row in self.entries))

    def conjugate_transpose(self) -> "RingMatrix":
        return self.transpose().conjugate()

    def matmul(self, other: "RingMatrix") -> "RingMatrix":
        _check_ell(self.ell, other.ell)
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {(self.rows, self.cols)} by {(other.rows, other.cols)}")
        out = []
        for r in range(self.rows):
            row = []
            for c in range(other.cols):
                acc = RingElement.zero(self.ell)
                for k in range(self.cols):
                    if not self.entries[r][k].is_zero():
                        acc = acc + ring_mul(self.entries[r][k], other.entries[k][c])
                row.append(acc)
            out.append(tuple(row))
        return RingMatrix(self.ell, self.rows, other.cols, tuple(out))

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        return self.matmul(other)

    def kron(self, other: "RingMatrix") -> "RingMatrix":
        _check_ell(self.ell, other.ell)
        rows, cols = self.rows * other.rows, self.cols * other.cols
        grid = [[0] * cols for _ in range(rows)]
        for r1 in range(self.rows):
            for c1 in range(self.cols):
                f = self.entries[r1][c1]
                if f.is_zero():
                    continue
                for r2 in range(other.rows):
                    for c2 in range(other.cols):
                        grid[r1 * other.rows + r2][c1 * other.cols + c2] = ring_mul(f, other.entries[r2][c2]).value
        return RingMatrix.from_ints(grid, self.ell)

    def hstack(self, other: "RingMatrix") -> "RingMatrix":
        _check_ell(self.ell, other.ell)
        if self.rows != other.rows:
            raise DimensionError(f"hstack row mismatch {self.rows} vs {other.rows}")
        return RingMatrix(self.ell, self.rows, self.cols + other.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def vstack(self, other: "RingMatrix") -> "RingMatrix":
        _check_ell(self.ell, other.ell)
        if self.cols != other.cols:
            raise DimensionError(f"vstack column mismatch {self.cols} vs {other.cols}")
        return RingMatrix(self.ell, self.rows + other.rows, self.cols, self.entries + other.entries)

    def sparse_entries(self) -> List[list]:
        """Nonzero entries as ``[row, col, [exponents]]`` triples."""
        out = []
        for r, row in enumerate(self.entries):
            for c, f in enumerate(row):
                if not f.is_zero():
                    out.append([r, c, f.exponents()])
        return out

    @classmethod
    def from_sparse_entries(cls, rows: int, cols: int, ell: int, entries: Iterable[Sequence]) -> "RingMatrix":
        grid = [[0] * cols for _ in range(rows)]
        for r, c, exps in entries:
            grid[int(r)][int(c)] = RingElement.from_exponents(exps, ell).value
        return cls.from_ints(grid, ell)


def expand_to_f2(M: RingMatrix) -> BitMat:
    """Replace each entry f by its l x l block with ``B[i, m] = f_{(m - i) mod l}``."""
    ell = M.ell
    dense = np.zeros((M.rows * ell, M.cols * ell), dtype=np.uint8)
    i = np.arange(ell)
    for r, row in enumerate(M.entries):
        for c, f in enumerate(row):
            for k in f.exponents():
                dense[r * ell + i, c * ell + (i + k) % ell] ^= 1
    return BitMat.from_dense(dense)


def apply(M: RingMatrix, a: ModuleElement) -> ModuleElement:
    _check_ell(M.ell, a.ell)
    if M.cols != a.n:
        raise DimensionError(f"matrix has {M.cols} columns but module element has rank {a.n}")
    out = np.zeros((M.rows, M.ell), dtype=np.uint8)
    for r, row in enumerate(M.entries):
        for c, f in enumerate(row):
            for k in f.exponents():
                out[r] ^= np.roll(a.coeffs[c], -k)
    return ModuleElement(M.ell, M.rows, out)


def repetition_factor_solve(zeta: RingElement) -> Optional[RingElement]:
    """Minimum-weight chi with ``(1 + X) chi = zeta``, or None when zeta has odd weight.

    Solutions satisfy ``chi_i = chi_0 + zeta_1 + ... + zeta_i``; both choices of
    chi_0 are scanned and the lighter kept, preferring chi_0 = 0 on ties.
    """
    ell = zeta.ell
    if zeta.weight % 2:
        return None
    bits = zeta.coeffs.to_bits().astype(np.int64)
    cand = np.zeros(ell, dtype=np.uint8)
    cand[1:] = np.cumsum(bits[1:]) % 2
    if int(cand.sum()) * 2 > ell:
        cand ^= 1
    return RingElement(ell, BitVec.from_bits(cand))


def repetition_rows_solve(z: np.ndarray) -> Optional[np.ndarray]:
    """Row-wise minimum-weight x with ``x[:, i] + x[:, i+1] = z[:, i]`` (indices mod l).

    This is the (1 + X) solve in the (h, i) component convention applied to every
    row at once. Returns None when some row has odd parity.
    """
    z = np.asarray(z, dtype=np.uint8)
    if z.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {z.shape}")
    rows, ell = z.shape
    if rows == 0:
        return z.copy()
    if np.any(z.sum(axis=1) % 2):
        return None
    x = np.zeros_like(z)
    x[:, 1:] = np.cumsum(z[:, :-1], axis=1, dtype=np.int64) % 2
    heavy = x.sum(axis=1, dtype=np.int64) * 2 > ell
    x[heavy] ^= 1
    return x


def solve_repetition_factor(z: ModuleElement) -> Optional[ModuleElement]:
    x = repetition_rows_solve(z.coeffs)
    if x is None:
        return None
    return ModuleElement(z.ell, z.n, x)
