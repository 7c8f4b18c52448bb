"""Code bundles: the Tanner factor, the product code, budgets and radius built from one config.

A bundle is saved as JSON and reloaded by ``params`` and ``decode`` when its code fields match.
"""
import json
import logging
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Optional

import numpy as np

from .complexes import ChainComplex3, CodeParams, code_params, complex_from_dict, complex_to_dict
from .config import ExperimentConfig
from .errors import BuildStageError, ChainComplexError
from .f2 import BitMat
from .flip_decoders import ErrorBudgets, error_budgets
from .product_decoders import ProductCode, RadiusReport, combined_budgets, hgp_product, lp_product, theoretical_radius
from .tanner import BaseEdge, BaseGraph, InnerCode, TannerCode, lift_graph, random_tanner_code, repetition_tanner_code

logger = logging.getLogger(__name__)

BUNDLE_FORMAT_VERSION = 1

# config fields that determine the code itself; a stored bundle is only reused when they all match
CODE_FIELDS = (
    "mode",
    "classical",
    "ell",
    "lift_ell",
    "v0",
    "delta",
    "gamma_inner",
    "d_min",
    "lambda_target",
    "seed",
    "max_lift_tries",
    "max_inner_tries",
    "oracle_budget",
)


@dataclass
class CodeBundle:
    """Everything a sweep needs: the Tanner factor, the product, budgets and radius."""

    config: ExperimentConfig
    tanner: TannerCode
    product: ProductCode
    params: CodeParams
    budgets: ErrorBudgets
    combined: ErrorBudgets
    radius: RadiusReport

    @property
    def lam(self) -> float:
        return self.tanner.measured_lambda if self.tanner.measured_lambda is not None else 1.0

    @property
    def product_gamma(self) -> int:
        return _product_gamma(self.product, self.tanner)

    @property
    def locality(self) -> int:
        return self.tanner.complex.locality

    @cached_property
    def dual_complex(self) -> ChainComplex3:
        return self.product.complex.dual()

    @property
    def in_proven_regime(self) -> bool:
        return self.lam < self.tanner.inner.d_inner / (16 * self.tanner.delta)


def _product_gamma(product: ProductCode, code: TannerCode) -> int:
    # the dual side runs the cochain decoder, whose gamma (4 Delta) is the larger one
    return max(product.gamma, 4 * code.delta)


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        raise BuildStageError(name, exc) from exc


def _build_tanner(config: ExperimentConfig, rng: np.random.Generator) -> TannerCode:
    if config.classical == "repetition":
        return repetition_tanner_code(config.tanner_ell)
    return random_tanner_code(
        config.v0,
        config.delta,
        config.tanner_ell,
        rng,
        gamma=config.gamma_inner,
        d_min=config.d_min,
        lambda_target=config.lambda_target,
        max_lift_tries=config.max_lift_tries,
        max_inner_tries=config.max_inner_tries,
    )


def _build_product(config: ExperimentConfig, code: TannerCode) -> ProductCode:
    if config.mode == "lp":
        return lp_product(code)
    return hgp_product(code, config.ell)


def assemble_bundle(config: ExperimentConfig, code: TannerCode, product: ProductCode, params: CodeParams) -> CodeBundle:
    """Derive budgets and radius for an already built code under the decoder settings of ``config``."""
    lam = code.measured_lambda if code.measured_lambda is not None else 1.0
    budgets = _stage("budgets", error_budgets, code, lam)
    combined = combined_budgets(budgets)
    gamma = _product_gamma(product, code)
    radius = theoretical_radius(
        config.mode, config.ell, combined, gamma, code.complex.locality, config.eps, params.d
    )
    return CodeBundle(config, code, product, params, budgets, combined, radius)


def build_bundle(config: ExperimentConfig) -> CodeBundle:
    """Build the Tanner code, the product, budgets and (when affordable) the exact distance."""
    rng = np.random.default_rng(config.seed)
    code = _stage("tanner", _build_tanner, config, rng)
    product = _stage("product", _build_product, config, code)
    params = _stage("oracle", code_params, product.complex, config.oracle_budget)
    logger.info("built %s code n=%d k=%d d=%s", config.mode, params.n, params.k, params.d)
    return assemble_bundle(config, code, product, params)


def bundle_to_dict(bundle: CodeBundle) -> Dict[str, Any]:
    code = bundle.tanner
    base = code.graph.base
    return {
        "format_version": BUNDLE_FORMAT_VERSION,
        "config": bundle.config.model_dump(),
        "tanner": {
            "ell": code.ell,
            "v0": base.v0,
            "delta": base.delta,
            "edges": [[e.u, e.v, e.label, e.port_u, e.port_v] for e in base.edges],
            "inner": {
                "gamma": code.gamma,
                "d_inner": code.inner.d_inner,
                "Z": code.inner.dense.tolist(),
            },
            "measured_lambda": code.measured_lambda,
        },
        "params": {
            "n": bundle.params.n,
            "k": bundle.params.k,
            "d": bundle.params.d,
            "locality": bundle.params.locality,
        },
        "complex": complex_to_dict(bundle.product.complex),
    }


def bundle_from_dict(doc: Dict[str, Any]) -> CodeBundle:
    version = doc.get("format_version")
    if version != BUNDLE_FORMAT_VERSION:
        raise ValueError(f"unsupported bundle format_version {version!r}")
    config = ExperimentConfig(**doc["config"])
    t = doc["tanner"]
    base = BaseGraph(t["v0"], t["delta"], tuple(BaseEdge(*map(int, e)) for e in t["edges"]))
    inner_doc = t["inner"]
    inner = InnerCode(t["delta"], inner_doc["gamma"], BitMat.from_dense(inner_doc["Z"]), inner_doc["d_inner"])
    code = TannerCode(lift_graph(base, t["ell"]), inner, t["measured_lambda"])
    product = _build_product(config, code)
    stored = complex_from_dict(doc["complex"])
    if stored != product.complex:
        raise ChainComplexError("stored complex does not match the complex rebuilt from the Tanner data")
    params = CodeParams(**doc["params"])
    return assemble_bundle(config, code, product, params)


def save_bundle(bundle: CodeBundle, path: str) -> str:
    out_dir = os.path.dirname(path)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(bundle_to_dict(bundle), f, sort_keys=True)
        f.write("\n")
    return path


def load_bundle(path: str) -> CodeBundle:
    with open(path, "r", encoding="utf-8") as f:
        return bundle_from_dict(json.load(f))


def stale_fields(stored: ExperimentConfig, requested: ExperimentConfig) -> List[str]:
    """Code-defining config fields on which a stored bundle differs from the requested config."""
    return [name for name in CODE_FIELDS if getattr(stored, name) != getattr(requested, name)]


def load_or_build(config: ExperimentConfig, path: Optional[str] = None) -> CodeBundle:
    """Reuse the bundle at ``path`` when it was built from the same code fields, otherwise build afresh.

    Decoder settings (strategies, eps, failure_delta) and output paths always come from ``config``.
    """
    if not path or not os.path.isfile(path):
        return build_bundle(config)
    loaded = load_bundle(path)
    differ = stale_fields(loaded.config, config)
    if differ:
        logger.warning("bundle %s was built with different %s; rebuilding", path, ", ".join(differ))
        return build_bundle(config)
    return assemble_bundle(config, loaded.tanner, loaded.product, loaded.params)
