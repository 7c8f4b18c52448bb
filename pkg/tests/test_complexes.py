import numpy as np
import pytest

from qldpctoolkit.complexes import (
    ChainComplex2,
    ChainComplex3,
    classical_distance,
    cochain2,
    code_params,
    complex_from_dict,
    complex_to_dict,
    coset_check,
    coset_witness,
    distance_oracle,
    expansion_check,
    homology_dims,
    hypergraph_product,
    kunneth_dimension,
    lifted_product,
    logical_representative,
    repetition_complex,
)
from qldpctoolkit.errors import ChainComplexError, EnumerationBudgetError
from qldpctoolkit.f2 import BitMat, BitVec, mat_vec
from qldpctoolkit.group_algebra import RingElement, RingMatrix, expand_to_f2


def _random_f2_complex(rng, rows, cols):
    return ChainComplex2(BitMat.from_dense((rng.random((rows, cols)) < 0.4).astype(np.uint8)))


def _random_ring_complex(rng, rows, cols, ell):
    ring = RingMatrix.from_ints(rng.integers(0, 1 << ell, size=(rows, cols)).tolist(), ell)
    return ChainComplex2(expand_to_f2(ring), ring)


HAMMING = BitMat.from_dense(
    [
        [1, 0, 1, 0, 1, 0, 1],
        [0, 1, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ]
)


def test_repetition_complex():
    rep = repetition_complex(5)
    assert homology_dims(rep) == (1, 1)
    assert classical_distance(rep) == 5
    assert rep.ell == 5
    assert cochain2(rep).boundary == rep.boundary.T
    with pytest.raises(ValueError):
        repetition_complex(1)


def test_classical_distance_hamming():
    assert classical_distance(ChainComplex2(HAMMING)) == 3
    assert classical_distance(ChainComplex2(BitMat.identity(3))) is None


@pytest.mark.parametrize("ell", [3, 4])
def test_toric_code_parameters(ell):
    rep = repetition_complex(ell)
    C = hypergraph_product(rep, rep)
    params = code_params(C, oracle_budget=1 << 20)
    assert params.n == 2 * ell * ell
    assert params.k == 2
    assert params.d == ell
    assert params.locality == 4


def test_hypergraph_product_kunneth():
    rng = np.random.default_rng(12)
    for _ in range(50):
        A = _random_f2_complex(rng, 3, 5)
        B = _random_f2_complex(rng, 4, 4)
        C = hypergraph_product(A, B)
        assert (C.d1 @ C.d2).is_zero()
        assert code_params(C).k == kunneth_dimension(A, B)


def test_hypergraph_product_distance_is_at_least_the_factor_distances():
    rng = np.random.default_rng(17)
    checked = 0
    for _ in range(50):
        A = _random_f2_complex(rng, 2, 3)
        B = _random_f2_complex(rng, 2, 3)
        d = distance_oracle(hypergraph_product(A, B))
        if d is None:
            continue
        factors = [classical_distance(F) for F in (A, B, cochain2(A), cochain2(B))]
        assert d >= min(f for f in factors if f is not None)
        checked += 1
    assert checked > 0
    rep3, rep4 = repetition_complex(3), repetition_complex(4)
    assert distance_oracle(hypergraph_product(rep3, rep4)) == 3


def test_lifted_product_is_a_complex():
    rng = np.random.default_rng(13)
    for _ in range(100):
        A = _random_ring_complex(rng, 2, 3, 3)
        B = _random_ring_complex(rng, 2, 2, 3)
        C = lifted_product(A, B)
        assert (C.d1 @ C.d2).is_zero()
        assert C.ell == 3
        assert C.n == (2 * 2 + 3 * 2) * 3
        assert expand_to_f2(C.ring_d1) == C.d1


def test_lifted_product_preconditions():
    rng = np.random.default_rng(14)
    with pytest.raises(ChainComplexError):
        lifted_product(_random_f2_complex(rng, 2, 3), repetition_complex(3))
    with pytest.raises(ChainComplexError):
        lifted_product(_random_ring_complex(rng, 2, 3, 4), repetition_complex(3))


def test_invalid_complexes_rejected():
    with pytest.raises(ChainComplexError):
        ChainComplex3(BitMat.identity(2), BitMat.from_dense([[1, 0]]))
    ring = RingMatrix(3, 1, 1, ((RingElement.from_exponents([0, 1], 3),),))
    with pytest.raises(ChainComplexError):
        ChainComplex2(BitMat.identity(3), ring)


def test_dual_is_an_involution(toric4):
    assert toric4.dual().dual() == toric4
    assert code_params(toric4.dual()).k == code_params(toric4).k
    rng = np.random.default_rng(15)
    C = lifted_product(_random_ring_complex(rng, 2, 3, 4), repetition_complex(4))
    assert C.dual().dual() == C
    assert C.dual().d2 == C.d1.T


def test_coset_check(toric4):
    rng = np.random.default_rng(16)
    c = BitVec.from_bits(rng.integers(0, 2, toric4.n))
    stabilizer = toric4.d2.T.row(3)
    assert coset_check(toric4, c, c + stabilizer)
    z = coset_witness(toric4, c, c + stabilizer)
    assert mat_vec(toric4.d2, z) == stabilizer
    logical = logical_representative(toric4)
    assert logical.weight == 4
    assert not mat_vec(toric4.d1, logical)
    assert not coset_check(toric4, c, c + logical)


def test_oracle_budget(toric4):
    with pytest.raises(EnumerationBudgetError):
        distance_oracle(toric4, budget=16)
    assert code_params(toric4, oracle_budget=16).d is None
    assert code_params(toric4).d is None


def test_expansion_check():
    rep = repetition_complex(6)
    assert expansion_check(rep, 0.5, 0.6)
    assert not expansion_check(rep, 0.5, 1.0)
    assert expansion_check(rep, 0.5, 0.0)
    with pytest.raises(EnumerationBudgetError):
        expansion_check(rep, 1.0, 0.5, budget=10)


def test_serialization(toric4):
    assert complex_from_dict(complex_to_dict(toric4)) == toric4
    rep = repetition_complex(4)
    assert complex_from_dict(complex_to_dict(rep)) == rep
    C = lifted_product(rep, rep)
    doc = complex_to_dict(C)
    assert doc["kind"] == "chain3" and doc["d1"]["ell"] == 4
    assert complex_from_dict(doc) == C
    with pytest.raises(ValueError):
        complex_from_dict({**doc, "format_version": 99})
    with pytest.raises(ValueError):
        complex_from_dict({**doc, "kind": "chain4"})


def test_serialization_keeps_ring_forms_over_r1():
    rng = np.random.default_rng(18)
    A = _random_ring_complex(rng, 2, 3, 1)
    B = _random_ring_complex(rng, 2, 2, 1)
    C = lifted_product(A, B)
    back = complex_from_dict(complex_to_dict(C))
    assert back == C
    assert back.ring_d1 == C.ring_d1 and back.ring_d2 == C.ring_d2
    assert complex_from_dict(complex_to_dict(A)).ring_boundary == A.ring_boundary

    plain = hypergraph_product(repetition_complex(3), repetition_complex(3))
    doc = complex_to_dict(plain)
    assert doc["d1"]["ring"] is False and doc["d1"]["ell"] == 1
    assert complex_from_dict(doc).ring_d1 is None

    legacy = {**doc, "d1": {k: v for k, v in doc["d1"].items() if k != "ring"},
              "d2": {k: v for k, v in doc["d2"].items() if k != "ring"}}
    assert complex_from_dict(legacy) == plain
