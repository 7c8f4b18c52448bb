"""Experiment configuration: model defaults, then a JSON file, then CLI flags, then QLDPC_SEED."""

from __future__ import annotations

import json
import math
import os
from typing import Any, Dict, List, Literal, Mapping, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

SEED_ENV_VAR = "QLDPC_SEED"


def default_v0(ell: int) -> int:
    """max(8, 2 * ceil(log2 ell)), rounded up to even."""
    v0 = max(8, 2 * math.ceil(math.log2(max(ell, 2))))
    return v0 + (v0 % 2)


class ExperimentConfig(BaseModel):
    mode: Literal["hgp", "lp"] = "hgp"
    classical: Literal["tanner", "repetition"] = "tanner"
    ell: int = Field(8, ge=2, description="Repetition length / lift order of the product")
    lift_ell: Optional[int] = Field(None, ge=1, description="Tanner lift order in hgp mode (defaults to ell)")
    v0: Optional[int] = Field(None, ge=1, description="Base graph vertex count")
    delta: int = Field(14, ge=2, le=20, description="Base graph degree / inner code length")
    gamma_inner: int = Field(4, ge=1, description="Inner parity checks per vertex")
    d_min: int = Field(3, ge=1, description="Distance floor for ker Z and im Z^T")
    lambda_target: float = Field(0.7, gt=0, le=1)
    eps: float = Field(0.5, gt=0, le=0.5)
    failure_delta: float = Field(2.0**-10, gt=0, lt=1)
    hgp_strategy: Literal["deterministic", "randomized"] = "deterministic"
    lp_strategy: Literal["amplified", "weak"] = "amplified"
    error_weights: List[int] = Field(default_factory=lambda: [0, 1, 2])
    trials: int = Field(10, ge=1)
    sides: List[Literal["Z", "X"]] = Field(default_factory=lambda: ["Z", "X"])
    seed: int = Field(0, ge=0)
    workers: int = Field(1, ge=1)
    max_lift_tries: int = Field(20, ge=1)
    max_inner_tries: int = Field(100_000, ge=1)
    oracle_budget: int = Field(1 << 22, ge=1)
    replay_path: Optional[str] = None
    bundle_path: str = "results/bundle.json"
    trials_path: str = "results/trials.jsonl"
    summary_path: str = "results/summary.csv"

    @field_validator("error_weights")
    @classmethod
    def _weights_nonnegative(cls, v: List[int]) -> List[int]:
        bad = [w for w in v if w < 0]
        if bad:
            raise ValueError(f"error weights must be >= 0, got {bad}")
        return v

    @field_validator("sides")
    @classmethod
    def _sides_nonempty(cls, v: List[str]) -> List[str]:
        if not v:
            raise ValueError("at least one side (Z or X) is required")
        return list(dict.fromkeys(v))

    @model_validator(mode="after")
    def _fill_and_check(self) -> "ExperimentConfig":
        if self.mode == "lp" and self.ell & (self.ell - 1):
            raise ValueError(f"lp mode needs ell a power of two, got {self.ell}")
        if self.mode == "lp" and self.lift_ell not in (None, self.ell):
            raise ValueError(f"lp mode lifts the Tanner code to ell={self.ell}; lift_ell={self.lift_ell} conflicts")
        if self.gamma_inner > self.delta:
            raise ValueError(f"gamma_inner={self.gamma_inner} exceeds delta={self.delta}")
        if self.lift_ell is None:
            self.lift_ell = self.ell
        if self.v0 is None:
            self.v0 = default_v0(self.tanner_ell)
        return self

    @property
    def tanner_ell(self) -> int:
        if self.mode == "lp":
            return self.ell
        return self.lift_ell if self.lift_ell is not None else self.ell


def load_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """Merge a JSON config file, explicit overrides (None values ignored) and the seed env var."""
    data: Dict[str, Any] = {}
    if path:
        with open(path, "r", encoding="utf-8") as f:
            data.update(json.load(f))
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed:
        try:
            data["seed"] = int(env_seed)
        except ValueError:
            raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {env_seed!r}")
    return ExperimentConfig(**data)
