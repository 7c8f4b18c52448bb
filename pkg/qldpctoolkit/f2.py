"""Bit-packed linear algebra over F2.

Vectors and matrix rows are stored as Python integers used as bitsets (bit ``i``
is coordinate ``i``), so addition is a single XOR and weights are popcounts.
numpy is used only to move between packed and unpacked (``uint8``) forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence

import numpy as np

from .errors import DimensionError

__all__ = [
    "BitVec",
    "BitMat",
    "LinearSolver",
    "weight",
    "mat_vec",
    "solve",
    "rank",
    "kernel_basis",
    "iter_bits",
]


def iter_bits(x: int) -> Iterator[int]:
    """Yield the positions of the set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _pack(bits: np.ndarray) -> int:
    packed = np.packbits(np.asarray(bits, dtype=np.uint8) & 1, bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _unpack(value: int, length: int) -> np.ndarray:
    nbytes = (length + 7) // 8
    raw = np.frombuffer(value.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little", count=length)


@dataclass(frozen=True)
class BitVec:
    length: int
    payload: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise DimensionError(f"negative length {self.length}")
        if self.payload < 0 or self.payload >> self.length:
            raise DimensionError(f"payload does not fit in {self.length} bits")

    @classmethod
    def zeros(cls, length: int) -> "BitVec":
        return cls(length, 0)

    @classmethod
    def ones(cls, length: int) -> "BitVec":
        return cls(length, (1 << length) - 1)

    @classmethod
    def unit(cls, length: int, index: int) -> "BitVec":
        if not 0 <= index < length:
            raise DimensionError(f"index {index} outside [0, {length})")
        return cls(length, 1 << index)

    @classmethod
    def from_bits(cls, bits: Iterable[int] | np.ndarray) -> "BitVec":
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
        return cls(int(arr.size), _pack(arr.ravel()))

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> "BitVec":
        value = 0
        for i in support:
            if not 0 <= i < length:
                raise DimensionError(f"support index {i} outside [0, {length})")
            value ^= 1 << int(i)
        return cls(length, value)

    @classmethod
    def from_string(cls, text: str) -> "BitVec":
        """Parse ``'10110'`` with the first character as coordinate 0."""
        return cls.from_bits(int(ch) for ch in text.strip())

    def to_bits(self) -> np.ndarray:
        return _unpack(self.payload, self.length)

    def support(self) -> List[int]:
        return list(iter_bits(self.payload))

    @property
    def weight(self) -> int:
        return self.payload.bit_count()

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, index: int) -> int:
        if not -self.length <= index < self.length:
            raise IndexError(index)
        return (self.payload >> (index % self.length)) & 1

    def __add__(self, other: "BitVec") -> "BitVec":
        if self.length != other.length:
            raise DimensionError(f"cannot add vectors of length {self.length} and {other.length}")
        return BitVec(self.length, self.payload ^ other.payload)

    __xor__ = __add__
    __sub__ = __add__

    def __bool__(self) -> bool:
        return self.payload != 0

    def concat(self, other: "BitVec") -> "BitVec":
        return BitVec(self.length + other.length, self.payload | (other.payload << self.length))

    def split(self, first: int) -> tuple["BitVec", "BitVec"]:
        if not 0 <= first <= self.length:
            raise DimensionError(f"split point {first} outside [0, {self.length}]")
        head = self.payload & ((1 << first) - 1)
        return BitVec(first, head), BitVec(self.length - first, self.payload >> first)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.to_bits())


def weight(v: BitVec) -> int:
    return v.weight


@dataclass(frozen=True)
class BitMat:
    """Row-major F2 matrix; ``payload[r]`` is row ``r`` as a column bitset."""

    rows: int
    cols: int
    payload: tuple[int, ...]

    def __post_init__(self):
        if len(self.payload) != self.rows:
            raise DimensionError(f"expected {self.rows} rows, got {len(self.payload)}")
        limit = 1 << self.cols
        for row in self.payload:
            if row < 0 or row >= limit:
                raise DimensionError(f"row does not fit in {self.cols} columns")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMat":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n: int) -> "BitMat":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_dense(cls, array: np.ndarray | Sequence[Sequence[int]]) -> "BitMat":
        arr = np.asarray(array, dtype=np.uint8)
        if arr.ndim != 2:
            raise DimensionError(f"expected a 2-d array, got shape {arr.shape}")
        rows, cols = arr.shape
        if cols == 0:
            return cls.zeros(rows, 0)
        packed = np.packbits(arr & 1, axis=1, bitorder="little")
        return cls(rows, cols, tuple(int.from_bytes(packed[r].tobytes(), "little") for r in range(rows)))

    @classmethod
    def from_rows(cls, rows: Sequence[BitVec], cols: Optional[int] = None) -> "BitMat":
        if cols is None:
            if not rows:
                raise DimensionError("column count required for an empty row list")
            cols = rows[0].length
        for r in rows:
            if r.length != cols:
                raise DimensionError(f"row of length {r.length} in a {cols}-column matrix")
        return cls(len(rows), cols, tuple(r.payload for r in rows))

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable[tuple[int, int]]) -> "BitMat":
        acc = [0] * rows
        for r, c in entries:
            acc[r] ^= 1 << c
        return cls(rows, cols, tuple(acc))

    def to_dense(self) -> np.ndarray:
        nbytes = (self.cols + 7) // 8
        if self.rows == 0 or nbytes == 0:
            return np.zeros((self.rows, self.cols), dtype=np.uint8)
        buf = b"".join(r.to_bytes(nbytes, "little") for r in self.payload)
        raw = np.frombuffer(buf, dtype=np.uint8).reshape(self.rows, nbytes)
        return np.unpackbits(raw, axis=1, bitorder="little", count=self.cols)

    def row(self, r: int) -> BitVec:
        return BitVec(self.cols, self.payload[r])

    def entries(self) -> Iterator[tuple[int, int]]:
        for r, row in enumerate(self.payload):
            for c in iter_bits(row):
                yield r, c

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_zero(self) -> bool:
        return not any(self.payload)

    def transpose(self) -> "BitMat":
        return BitMat.from_dense(self.to_dense().T)

    @property
    def T(self) -> "BitMat":
        return self.transpose()

    def matmul(self, other: "BitMat") -> "BitMat":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for row in self.payload:
            acc = 0
            for k in iter_bits(row):
                acc ^= other.payload[k]
            out.append(acc)
        return BitMat(self.rows, other.cols, tuple(out))

    def __matmul__(self, other: "BitMat") -> "BitMat":
        return self.matmul(other)

    def __add__(self, other: "BitMat") -> "BitMat":
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return BitMat(self.rows, self.cols, tuple(a ^ b for a, b in zip(self.payload, other.payload)))

    def hstack(self, other: "BitMat") -> "BitMat":
        if self.rows != other.rows:
            raise DimensionError(f"hstack row mismatch {self.rows} vs {other.rows}")
        return BitMat(
            self.rows,
            self.cols + other.cols,
            tuple(a | (b << self.cols) for a, b in zip(self.payload, other.payload)),
        )

    def vstack(self, other: "BitMat") -> "BitMat":
        if self.cols != other.cols:
            raise DimensionError(f"vstack column mismatch {self.cols} vs {other.cols}")
        return BitMat(self.rows + other.rows, self.cols, self.payload + other.payload)

    def kron(self, other: "BitMat") -> "BitMat":
        return BitMat.from_dense(np.kron(self.to_dense(), other.to_dense()))

    def select_columns(self, columns: Sequence[int]) -> "BitMat":
        return BitMat.from_dense(self.to_dense()[:, list(columns)])

    def row_weights(self) -> List[int]:
        return [r.bit_count() for r in self.payload]

    def column_weights(self) -> List[int]:
        return self.to_dense().sum(axis=0, dtype=np.int64).tolist()

    @property
    def locality(self) -> int:
        """Largest Hamming weight of any row or column."""
        weights = self.row_weights() + self.column_weights()
        return max(weights, default=0)


def mat_vec(M: BitMat, v: BitVec) -> BitVec:
    if M.cols != v.length:
        raise DimensionError(f"matrix has {M.cols} columns but vector has length {v.length}")
    x = v.payload
    out = 0
    for r, row in enumerate(M.payload):
        if (row & x).bit_count() & 1:
            out |= 1 << r
    return BitVec(M.rows, out)


class LinearSolver:
    """Column elimination of one matrix, reusable across many right-hand sides.

    Columns are inserted into an echelon basis keyed by their leading row bit,
    each carrying the set of original columns that sums to it. Columns that
    reduce to zero give the kernel basis for free. The input matrix is never
    modified.
    """

    def __init__(self, matrix: BitMat):
        self.rows = matrix.rows
        self.cols = matrix.cols
        self._pivots: dict[int, tuple[int, int]] = {}
        self._kernel: List[int] = []
        for c, column in enumerate(matrix.transpose().payload if matrix.rows else (0,) * matrix.cols):
            vec, comb = self._reduce(column, 1 << c)
            if vec:
                self._pivots[vec.bit_length() - 1] = (vec, comb)
            else:
                self._kernel.append(comb)

    def _reduce(self, vec: int, comb: int) -> tuple[int, int]:
        pivots = self._pivots
        while vec:
            entry = pivots.get(vec.bit_length() - 1)
            if entry is None:
                break
            vec ^= entry[0]
            comb ^= entry[1]
        return vec, comb

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def kernel_basis(self) -> List[BitVec]:
        return [BitVec(self.cols, comb) for comb in self._kernel]

    def contains(self, b: BitVec) -> bool:
        """True iff ``b`` lies in the column space."""
        return self.solve(b) is not None

    def solve(self, b: BitVec) -> Optional[BitVec]:
        if b.length != self.rows:
            raise DimensionError(f"right-hand side has length {b.length}, expected {self.rows}")
        vec, comb = self._reduce(b.payload, 0)
        if vec:
            return None
        return BitVec(self.cols, comb)


def solve(M: BitMat, b: BitVec) -> Optional[BitVec]:
    """Some ``x`` with ``M x = b``, or ``None`` when the system is inconsistent."""
    if M.rows != b.length:
        raise DimensionError(f"matrix has {M.rows} rows but right-hand side has length {b.length}")
    return LinearSolver(M).solve(b)


def rank(M: BitMat) -> int:
    # eliminate along the shorter side
    if M.rows < M.cols:
        return LinearSolver(M.transpose()).rank
    return LinearSolver(M).rank


def kernel_basis(M: BitMat) -> List[BitVec]:
    return LinearSolver(M).kernel_basis()
