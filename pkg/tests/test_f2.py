import numpy as np
import pytest

from qldpctoolkit.errors import DimensionError
from qldpctoolkit.f2 import BitMat, BitVec, LinearSolver, kernel_basis, mat_vec, rank, solve


def _random_mat(rng, rows, cols, density=0.4):
    return BitMat.from_dense((rng.random((rows, cols)) < density).astype(np.uint8))


def test_bitvec_basics():
    v = BitVec.from_string("1011")
    assert v.support() == [0, 2, 3]
    assert v.weight == 3
    assert str(v) == "1011"
    assert v[1] == 0 and v[-1] == 1
    assert BitVec.unit(4, 1) + v == BitVec.ones(4)


def test_bitvec_length_mismatch():
    with pytest.raises(DimensionError):
        BitVec.zeros(3) + BitVec.zeros(4)
    with pytest.raises(DimensionError):
        BitVec.from_support(3, [3])


def test_concat_and_split():
    a = BitVec.from_string("110")
    b = BitVec.from_string("0101")
    joined = a.concat(b)
    assert str(joined) == "1100101"
    head, tail = joined.split(3)
    assert head == a and tail == b


def test_dense_conversion_keeps_entries():
    dense = np.array([[1, 0, 1, 1, 0, 0, 0, 0, 1], [0, 1, 0, 0, 0, 0, 0, 0, 0]], dtype=np.uint8)
    M = BitMat.from_dense(dense)
    assert M.shape == (2, 9)
    assert np.array_equal(M.to_dense(), dense)
    assert sorted(M.entries()) == [(0, 0), (0, 2), (0, 3), (0, 8), (1, 1)]


def test_matmul_kron_transpose_match_numpy():
    rng = np.random.default_rng(1)
    A = _random_mat(rng, 5, 7)
    B = _random_mat(rng, 7, 3)
    assert np.array_equal((A @ B).to_dense(), (A.to_dense().astype(int) @ B.to_dense()) % 2)
    assert np.array_equal(A.kron(B).to_dense(), np.kron(A.to_dense(), B.to_dense()))
    assert np.array_equal(A.T.to_dense(), A.to_dense().T)
    with pytest.raises(DimensionError):
        A @ A


def test_stacking():
    I2 = BitMat.identity(2)
    Z2 = BitMat.zeros(2, 2)
    assert np.array_equal(I2.hstack(Z2).to_dense(), np.hstack([np.eye(2), np.zeros((2, 2))]))
    assert I2.vstack(Z2).shape == (4, 2)


def test_locality_is_max_row_or_column_weight():
    M = BitMat.from_dense([[1, 1, 0], [1, 0, 0], [1, 0, 1]])
    assert M.row_weights() == [2, 1, 2]
    assert M.column_weights() == [3, 1, 1]
    assert M.locality == 3


def test_solve_returns_a_preimage():
    rng = np.random.default_rng(2)
    for _ in range(20):
        M = _random_mat(rng, 6, 9)
        x = BitVec.from_bits(rng.integers(0, 2, 9))
        b = mat_vec(M, x)
        y = solve(M, b)
        assert y is not None
        assert mat_vec(M, y) == b


def test_solve_inconsistent_is_none():
    M = BitMat.from_dense([[1, 0], [1, 0]])
    assert solve(M, BitVec.from_string("10")) is None
    assert solve(M, BitVec.from_string("11")) is not None


def test_rank_nullity_and_transpose():
    rng = np.random.default_rng(3)
    for rows, cols in [(4, 8), (8, 4), (6, 6)]:
        M = _random_mat(rng, rows, cols)
        kernel = kernel_basis(M)
        assert rank(M) + len(kernel) == cols
        assert rank(M) == rank(M.T)
        for v in kernel:
            assert not mat_vec(M, v)
    assert rank(BitMat.identity(5)) == 5
    assert rank(BitMat.zeros(3, 4)) == 0


def test_linear_solver_reuse():
    M = BitMat.from_dense([[1, 1, 0], [0, 1, 1]])
    solver = LinearSolver(M)
    assert solver.rank == 2
    assert len(solver.kernel_basis()) == 1
    assert solver.kernel_basis()[0] == BitVec.ones(3)
    for text in ("00", "10", "01", "11"):
        assert solver.contains(BitVec.from_string(text))
    with pytest.raises(DimensionError):
        solver.solve(BitVec.zeros(3))


def test_mat_vec_dimension_check():
    with pytest.raises(DimensionError):
        mat_vec(BitMat.identity(3), BitVec.zeros(2))
