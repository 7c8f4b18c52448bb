"""Decoders for products of a Tanner complex with the repetition complex.

``C_1 = A_0 (x) B_1 (+) A_1 (x) B_0`` holds errors ``c = (x, y)``. Both blocks are
stored as arrays with one row per A-coordinate and one column per position of
the cyclic direction, flattened row-major (``index = row * l + i``). In that
layout the syndrome is

    S[:, i] = X[:, i] + X[:, i + 1] + (d^A Y)[:, i]

where d^A acts on each column separately for the hypergraph product (hgp) and
on the whole flattened module for the lifted product (lp).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .complexes import ChainComplex2, ChainComplex3, cochain2, hypergraph_product, lifted_product, repetition_complex
from .f2 import BitMat, BitVec, mat_vec
from .flip_decoders import ClassicalDecoder, ErrorBudgets
from .group_algebra import ModuleElement, expand_to_f2, repetition_rows_solve
from .tanner import TannerCode

logger = logging.getLogger(__name__)

MODES = ("hgp", "lp")
HGP_STRATEGIES = ("deterministic", "randomized")
LP_STRATEGIES = ("amplified", "weak")

__all__ = [
    "DecodeOutcome",
    "ProductCode",
    "hgp_product",
    "lp_product",
    "relabel",
    "reflect",
    "prefix_syndromes",
    "dec_hgp",
    "hgp_decode_deterministic",
    "hgp_decode_randomized",
    "amp_com",
    "weak_dec",
    "lp_decode",
    "decode",
    "decode_dual_side",
    "randomized_runs",
    "amplification_runs",
    "RadiusReport",
    "radius_terms",
    "theoretical_radius",
    "combined_budgets",
    "prefix_weight",
    "approximate_compatibility_bound",
]


@dataclass
class DecodeOutcome:
    estimate: Optional[BitVec]
    status: str
    weight: int
    trace: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @classmethod
    def failed(cls, **trace: Any) -> "DecodeOutcome":
        return cls(None, "fail", 0, dict(trace))


def reflect(v: np.ndarray, ell: int) -> np.ndarray:
    """``i -> -i`` inside every length-l block of a flat vector."""
    v = np.asarray(v)
    idx = np.arange(v.shape[0])
    return v[(idx // ell) * ell + (-(idx % ell)) % ell]


def relabel(c: np.ndarray, first: int, ell: int) -> np.ndarray:
    """Map ``(p, q)`` (split after ``first`` entries) to ``(R q, R p)``.

    This carries an error on one product to the matching error on the dual
    product; applying it again with the complementary split gives back ``c``.
    """
    c = np.asarray(c)
    return np.concatenate([reflect(c[first:], ell), reflect(c[:first], ell)])


class ProductCode:
    """A product complex together with the classical decoder for its A factor."""

    def __init__(self, mode: str, ell: int, factor: ClassicalDecoder, complex: ChainComplex3, dual_of: bool = False):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        self.mode = mode
        self.ell = ell
        self.factor = factor
        self.complex = complex
        self.is_dual = dual_of
        if mode == "hgp":
            self.rows_x, self.rows_y = factor.n_checks, factor.n_bits
        else:
            if factor.ell != ell:
                raise ValueError(f"lifted product needs a factor lifted to {ell}, got {factor.ell}")
            self.rows_x, self.rows_y = factor.n_checks // ell, factor.n_bits // ell
        if complex.n != (self.rows_x + self.rows_y) * ell:
            raise ValueError(f"complex has {complex.n} qubits, factor layout implies {(self.rows_x + self.rows_y) * ell}")

    @property
    def n(self) -> int:
        return self.complex.n

    @property
    def n_x(self) -> int:
        return self.rows_x * self.ell

    @property
    def gamma(self) -> int:
        return self.factor.gamma

    @cached_property
    def factor_locality(self) -> int:
        code = self.factor.code
        return code.complex.locality

    def split(self, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        c = np.asarray(c, dtype=np.uint8)
        return c[: self.n_x].reshape(self.rows_x, self.ell), c[self.n_x :].reshape(self.rows_y, self.ell)

    def join(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return np.concatenate([X.ravel(), Y.ravel()]).astype(np.uint8)

    def apply_factor(self, Y: np.ndarray) -> np.ndarray:
        """d^A on the y block, returned in the shape of the x block."""
        if self.mode == "lp":
            return self.factor.apply(Y.ravel()).reshape(self.rows_x, self.ell)
        out = np.zeros((self.rows_x, self.ell), dtype=np.uint8)
        for i in range(self.ell):
            if Y[:, i].any():
                out[:, i] = self.factor.apply(Y[:, i])
        return out

    def syndrome_matrix(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return X ^ np.roll(X, -1, axis=1) ^ self.apply_factor(Y)

    def syndrome_of(self, c: np.ndarray) -> np.ndarray:
        return self.syndrome_matrix(*self.split(c)).ravel()

    def syndrome(self, c: BitVec) -> BitVec:
        return BitVec.from_bits(self.syndrome_of(c.to_bits()))

    @cached_property
    def _d2_transpose(self) -> BitMat:
        return self.complex.d2.transpose()

    def cosyndrome(self, c: BitVec) -> BitVec:
        """``d2^T c``, the syndrome seen by the dual side."""
        return mat_vec(self._d2_transpose, c)

    def finish(self, s: np.ndarray, X: np.ndarray, Y: np.ndarray, trace: Dict[str, Any]) -> DecodeOutcome:
        estimate = self.join(X, Y)
        if not np.array_equal(self.syndrome_of(estimate), np.asarray(s, dtype=np.uint8)):
            raise RuntimeError(f"{self.mode} decoder produced an estimate with the wrong syndrome")
        return DecodeOutcome(BitVec.from_bits(estimate), "ok", int(estimate.sum()), trace)

    @cached_property
    def dual(self) -> "ProductCode":
        """The product whose first boundary is ``R d2^T`` after relabelling C^1 by ``(x, y) -> (R y, R x)``."""
        if self.is_dual:
            raise ValueError("dual of a dual product is not constructed")
        code: TannerCode = self.factor.code
        rep = repetition_complex(self.ell)
        if self.mode == "hgp":
            factor = ClassicalDecoder(code, "cochain")
            complex = hypergraph_product(cochain2(code.complex), rep)
        else:
            factor = ClassicalDecoder(code, "cochain", reflect=True)
            ring_t = code.complex.ring_boundary.transpose()
            complex = lifted_product(ChainComplex2(expand_to_f2(ring_t), ring_t), rep)
        return ProductCode(self.mode, self.ell, factor, complex, dual_of=True)

    def __repr__(self) -> str:
        return f"ProductCode(mode={self.mode!r}, ell={self.ell}, n={self.n}, dual={self.is_dual})"


def hgp_product(code: TannerCode, ell: int) -> ProductCode:
    """Hypergraph product of a Tanner complex with rep(l); the Tanner lift may differ from l."""
    complex = hypergraph_product(code.complex, repetition_complex(ell))
    return ProductCode("hgp", ell, ClassicalDecoder(code, "chain"), complex)


def lp_product(code: TannerCode) -> ProductCode:
    """Lifted product over R_l, l being the Tanner lift order."""
    complex = lifted_product(code.complex, repetition_complex(code.ell))
    return ProductCode("lp", code.ell, ClassicalDecoder(code, "chain"), complex)


def prefix_syndromes(S: np.ndarray, j: int) -> np.ndarray:
    """``P[:, k-1] = S[:, j] + ... + S[:, j+k-1]`` for k = 1..l (indices mod l)."""
    return np.cumsum(np.roll(S, -j, axis=1), axis=1, dtype=np.int64).astype(np.uint8) % 2


def dec_hgp(product: ProductCode, s: np.ndarray, j: int) -> DecodeOutcome:
    """One shifted run of the hypergraph-product decoder.

    Decodes every cyclic prefix sum of syndrome columns starting at j, reads the
    y estimate off consecutive differences, then solves the (1 + X) rows for x.
    """
    ell = product.ell
    S = np.asarray(s, dtype=np.uint8).reshape(product.rows_x, ell)
    if not S.any():
        return product.finish(S.ravel(), np.zeros_like(S), np.zeros((product.rows_y, ell), dtype=np.uint8), {"j": j})
    P = prefix_syndromes(S, j)
    a_prev = np.zeros(product.rows_y, dtype=np.uint8)
    Y = np.zeros((product.rows_y, ell), dtype=np.uint8)
    for k in range(ell):
        a_next = product.factor.decode(P[:, k])
        Y[:, (j + k) % ell] = a_next ^ a_prev
        a_prev = a_next
    X = repetition_rows_solve(S ^ product.apply_factor(Y))
    if X is None:
        return DecodeOutcome.failed(j=j)
    return product.finish(S.ravel(), X, Y, {"j": j})


def _best(outcomes: Sequence[DecodeOutcome], **trace: Any) -> DecodeOutcome:
    best = None
    for out in outcomes:
        if out.ok and (best is None or out.weight < best.weight):
            best = out
    if best is None:
        return DecodeOutcome.failed(**trace)
    best.trace.update(trace)
    return best


def hgp_decode_deterministic(product: ProductCode, s: np.ndarray) -> DecodeOutcome:
    """Run every shift and keep the lightest valid estimate (ties to the smallest j)."""
    return _best([dec_hgp(product, s, j) for j in range(product.ell)], runs=product.ell)


def randomized_runs(delta: float) -> int:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"failure probability must lie in (0, 1), got {delta}")
    return max(1, math.ceil(math.log2(1.0 / delta) - 1e-12))


def hgp_decode_randomized(product: ProductCode, s: np.ndarray, delta: float, rng: np.random.Generator) -> DecodeOutcome:
    K = randomized_runs(delta)
    shifts = rng.integers(product.ell, size=K).tolist()
    return _best([dec_hgp(product, s, j) for j in shifts], runs=K, shifts=shifts)


def _check_power_of_two(ell: int) -> int:
    if ell < 2 or ell & (ell - 1):
        raise ValueError(f"lifted-product decoding needs ell a power of two, got {ell}")
    return ell.bit_length() - 1


def _prefix(A: np.ndarray, k: int) -> np.ndarray:
    """``(X^0 + ... + X^{k-1}) a`` in (h, i) coordinates."""
    out = np.zeros_like(A)
    for i in range(k):
        out ^= np.roll(A, -i, axis=1)
    return out


def _amp_com_arrays(
    product: ProductCode, S: np.ndarray, Yt: np.ndarray, t: int, rng: np.random.Generator
) -> tuple[np.ndarray, int]:
    ell = product.ell
    residual = S ^ product.apply_factor(Yt)
    a = [np.zeros((product.rows_y, ell), dtype=np.uint8)]
    P = np.zeros_like(residual)
    for k in range(1, t + 1):
        P ^= np.roll(residual, -(k - 1), axis=1)
        a.append(product.factor.decode(P.ravel()).reshape(product.rows_y, ell))
    j = int(rng.integers(t))
    bases = (j + t * np.arange(ell // t)) % ell

    Zt = np.zeros_like(Yt)
    for i in range(1, t):
        Zt[:, (bases + i) % ell] = a[i + 1][:, bases] ^ a[i][:, bases]
    B = a[t] ^ _prefix(Zt, t)
    votes = np.zeros((product.rows_y, len(bases)), dtype=np.int64)
    for k in range(t):
        votes += B[:, (bases - k) % ell]
    R = np.zeros_like(Yt)
    R[:, bases] = (2 * votes > t).astype(np.uint8)  # ties go to 0
    return Yt ^ Zt ^ R, j


def amp_com(
    product: ProductCode, s: ModuleElement, y_tilde: ModuleElement, t: int, rng: np.random.Generator
) -> ModuleElement:
    """Amplify approximate compatibility of ``y_tilde`` from scale t/2 to scale t."""
    if product.mode != "lp":
        raise ValueError("amp_com runs on lifted products only")
    if t < 2 or t % 2 or product.ell % t:
        raise ValueError(f"need t even and dividing ell={product.ell}, got t={t}")
    out, _ = _amp_com_arrays(product, s.coeffs, y_tilde.coeffs, t, rng)
    return ModuleElement(product.ell, product.rows_y, out)


def weak_dec(product: ProductCode, s: np.ndarray, rng: np.random.Generator) -> DecodeOutcome:
    """Iterate amp_com over t = 2, 4, ..., l, then solve the (1 + X) rows for x."""
    eta = _check_power_of_two(product.ell)
    S = np.asarray(s, dtype=np.uint8).reshape(product.rows_x, product.ell)
    Yt = np.zeros((product.rows_y, product.ell), dtype=np.uint8)
    shifts: List[int] = []
    if S.any():
        for tau in range(eta):
            Yt, j = _amp_com_arrays(product, S, Yt, 2 ** (tau + 1), rng)
            shifts.append(j)
    X = repetition_rows_solve(S ^ product.apply_factor(Yt))
    if X is None:
        return DecodeOutcome.failed(shifts=shifts)
    return product.finish(S.ravel(), X, Yt, {"shifts": shifts})


def amplification_runs(eps: float, delta: float, eta: int) -> int:
    """``K = ceil(log delta / log(1 - (1 - eps)^eta))``."""
    if not 0.0 < eps <= 0.5:
        raise ValueError(f"eps must lie in (0, 1/2], got {eps}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"failure probability must lie in (0, 1), got {delta}")
    p = (1.0 - eps) ** eta
    if p >= 1.0:
        return 1
    return max(1, math.ceil(math.log(delta) / math.log(1.0 - p) - 1e-12))


def lp_decode(
    product: ProductCode, s: np.ndarray, eps: float, delta: float, rng: np.random.Generator
) -> DecodeOutcome:
    """K independent weak decodes with child generators; lightest valid estimate wins."""
    eta = _check_power_of_two(product.ell)
    K = amplification_runs(eps, delta, eta)
    logger.debug("lp_decode: eta=%d eps=%.3f delta=%.3g -> K=%d", eta, eps, delta, K)
    seeds = rng.integers(0, 2**63 - 1, size=K)
    runs = [weak_dec(product, s, np.random.default_rng(int(seed))) for seed in seeds]
    return _best(runs, runs=K)


def decode(
    product: ProductCode,
    s: np.ndarray,
    strategy: Optional[str] = None,
    rng: Optional[np.random.Generator] = None,
    eps: float = 0.5,
    delta: float = 2.0**-10,
) -> DecodeOutcome:
    """Dispatch to the decoder matching the product's mode."""
    rng = rng if rng is not None else np.random.default_rng(0)
    if product.mode == "hgp":
        strategy = strategy or "deterministic"
        if strategy == "deterministic":
            return hgp_decode_deterministic(product, s)
        if strategy == "randomized":
            return hgp_decode_randomized(product, s, delta, rng)
        raise ValueError(f"hgp strategy must be one of {HGP_STRATEGIES}, got {strategy!r}")
    strategy = strategy or "amplified"
    if strategy == "amplified":
        return lp_decode(product, s, eps, delta, rng)
    if strategy == "weak":
        return weak_dec(product, s, rng)
    raise ValueError(f"lp strategy must be one of {LP_STRATEGIES}, got {strategy!r}")


def decode_dual_side(
    product: ProductCode,
    s2: np.ndarray,
    strategy: Optional[str] = None,
    rng: Optional[np.random.Generator] = None,
    eps: float = 0.5,
    delta: float = 2.0**-10,
) -> DecodeOutcome:
    """Decode a syndrome ``d2^T c`` by running the primal pipeline on the dual product."""
    dual = product.dual
    inner = decode(dual, reflect(s2, product.ell), strategy, rng, eps, delta)
    if not inner.ok:
        return inner
    c = relabel(inner.estimate.to_bits(), dual.n_x, product.ell)
    estimate = BitVec.from_bits(c)
    if product.cosyndrome(estimate) != BitVec.from_bits(np.asarray(s2, dtype=np.uint8)):
        raise RuntimeError("dual-side estimate does not reproduce the cosyndrome")
    return DecodeOutcome(estimate, "ok", estimate.weight, inner.trace)


@dataclass(frozen=True)
class RadiusReport:
    e: int
    terms: Dict[str, float]
    distance_bounded: bool

    @property
    def limiting_term(self) -> str:
        return min(self.terms, key=self.terms.get)


def radius_terms(
    mode: str,
    ell: int,
    budgets: ErrorBudgets,
    gamma: int,
    w: int,
    eps: float = 0.5,
    distance: Optional[int] = None,
) -> Dict[str, float]:
    if mode == "hgp":
        terms = {"e0": float(budgets.e0), "e1": float(budgets.e1), "ell": ell / 2}
        if distance is not None:
            terms["distance"] = (distance - 1) / (2 + (w + 2) * gamma)
    elif mode == "lp":
        terms = {
            "e0": budgets.e0 / 2,
            "e1": eps * budgets.e1 / (48 * gamma),
            "ell": eps * ell / (12 * gamma),
        }
        if distance is not None:
            terms["distance"] = (distance - 1) / (2 * (w + 2) * gamma / eps + 2)
    else:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return terms


def theoretical_radius(
    mode: str,
    ell: int,
    budgets: ErrorBudgets,
    gamma: int,
    w: int,
    eps: float = 0.5,
    distance: Optional[int] = None,
) -> RadiusReport:
    """Largest error weight with a proven decoding guarantee; the distance term is dropped when d is unknown."""
    terms = radius_terms(mode, ell, budgets, gamma, w, eps, distance)
    e = max(0, math.floor(min(terms.values()) + 1e-12))
    return RadiusReport(e, terms, distance is not None)


def combined_budgets(budgets: ErrorBudgets) -> ErrorBudgets:
    """Budgets valid for both sides: syndrome-like blocks take min(e0, e1_co), code-like min(e1, e0_co)."""
    e0 = min(budgets.e0, budgets.e1_co)
    e1 = min(budgets.e1, budgets.e0_co)
    return ErrorBudgets(e0, e1, e1, e0)


def prefix_weight(v: ModuleElement, i: int) -> int:
    """``|X^0 v + ... + X^{i-1} v|``."""
    return int(_prefix(v.coeffs, i).sum())


def approximate_compatibility_bound(delta1: float, delta2: float, t: int, i: int) -> float:
    """Prefix-sum bound for a (delta1, delta2, t)-approximately compatible estimate."""
    return 2 * delta1 + math.ceil(i / t) * delta2
