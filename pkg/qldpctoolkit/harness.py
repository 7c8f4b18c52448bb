"""Benchmark harness.

Samples adversarial (or replayed) errors, decodes their syndromes on either side, audits each
estimate against the exact coset oracle and gates it against the proven radius. Sweeps write
one JSON line per trial and a pandas summary CSV.
"""
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from .bundle import CodeBundle, build_bundle, load_or_build, save_bundle
from .complexes import coset_witness
from .config import ExperimentConfig
from .f2 import BitVec
from .product_decoders import decode, decode_dual_side

logger = logging.getLogger(__name__)

SIDES = ("Z", "X")


def sample_adversarial_error(n: int, weight: int, rng: np.random.Generator) -> BitVec:
    """Uniformly random vector of length n with exactly ``weight`` set bits."""
    if weight < 0 or weight > n:
        raise ValueError(f"error weight {weight} outside [0, {n}]")
    support = rng.choice(n, size=weight, replace=False)
    return BitVec.from_support(n, support.tolist())


@dataclass
class TrialRecord:
    trial: int
    side: str
    weight: int
    output_weight: Optional[int]
    status: str
    coset_ok: Optional[bool]
    seed: List[int]
    error_support: List[int]
    witness_support: Optional[List[int]] = None
    gating_ok: bool = True
    gating_reason: Optional[str] = None
    replay: bool = False
    timings: Dict[str, float] = field(default_factory=dict)

    def to_json_dict(self) -> Dict[str, Any]:
        """Record without wall-clock timings, so identical runs serialize identically."""
        doc = asdict(self)
        doc.pop("timings")
        return doc


def _side_syndrome(bundle: CodeBundle, side: str, c: BitVec) -> np.ndarray:
    if side == "Z":
        return bundle.product.syndrome_of(c.to_bits())
    return bundle.product.cosyndrome(c).to_bits()


def _syndrome_length(bundle: CodeBundle, side: str) -> int:
    C = bundle.product.complex
    return C.d1.rows if side == "Z" else C.d2.cols


def _decode_side(bundle: CodeBundle, side: str, s: np.ndarray, rng: np.random.Generator):
    config = bundle.config
    strategy = config.hgp_strategy if config.mode == "hgp" else config.lp_strategy
    fn = decode if side == "Z" else decode_dual_side
    return fn(bundle.product, s, strategy, rng, config.eps, config.failure_delta)


def output_weight_cap(bundle: CodeBundle, weight: int) -> int:
    """``((w + 2) gamma + 1) |c|``, the largest estimate the hgp decoders may return for an error of this weight."""
    return ((bundle.locality + 2) * bundle.product_gamma + 1) * weight


def _gate(bundle: CodeBundle, record: TrialRecord, c: BitVec, estimate: Optional[BitVec]) -> Tuple[bool, Optional[str]]:
    radius = bundle.radius.e
    d = bundle.params.d
    if record.weight == 0:
        if record.status != "ok" or not record.coset_ok or record.output_weight != 0:
            return False, "zero error not decoded to zero"
        return True, None
    if record.status == "ok" and not record.coset_ok and d is not None and (estimate + c).weight < d:
        return False, "wrong coset below the code distance"
    # the hgp output-weight bound is checked on every estimate, whatever the radius
    if record.status == "ok" and bundle.config.mode == "hgp":
        cap = output_weight_cap(bundle, record.weight)
        if record.output_weight > cap:
            return False, f"output weight {record.output_weight} above {cap}"
    if 1 <= radius and record.weight <= radius:
        if record.status != "ok":
            return False, "decoder failed inside the proven radius"
        if not record.coset_ok:
            return False, "wrong coset inside the proven radius"
    return True, None


def run_trial(
    config: ExperimentConfig,
    bundle: CodeBundle,
    weight: int,
    rng: np.random.Generator,
    side: str = "Z",
    trial: int = 0,
    seed: Optional[List[int]] = None,
    error: Optional[BitVec] = None,
) -> TrialRecord:
    """Sample (or replay) one error, decode its syndrome, and audit the result against the coset oracle."""
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    n = bundle.product.n
    c = error if error is not None else sample_adversarial_error(n, weight, rng)

    t0 = time.perf_counter()
    s = _side_syndrome(bundle, side, c)
    t1 = time.perf_counter()
    outcome = _decode_side(bundle, side, s, rng)
    t2 = time.perf_counter()

    coset_ok = None
    witness = None
    if outcome.ok:
        C = bundle.product.complex if side == "Z" else bundle.dual_complex
        z = coset_witness(C, c, outcome.estimate)
        coset_ok = z is not None
        witness = z.support() if z is not None else None
    t3 = time.perf_counter()

    record = TrialRecord(
        trial=trial,
        side=side,
        weight=c.weight,
        output_weight=outcome.weight if outcome.ok else None,
        status=outcome.status,
        coset_ok=coset_ok,
        seed=list(seed) if seed is not None else [config.seed],
        error_support=c.support(),
        witness_support=witness,
        replay=error is not None,
        timings={"syndrome_s": t1 - t0, "decode_s": t2 - t1, "coset_s": t3 - t2},
    )
    record.gating_ok, record.gating_reason = _gate(bundle, record, c, outcome.estimate)
    if not record.gating_ok:
        logger.warning("gating failure in trial %d (%s, weight %d): %s", trial, side, c.weight, record.gating_reason)
    return record


def load_replay_file(path: str, n: int) -> List[Tuple[str, BitVec]]:
    """Read JSON-lines ``{"side": "Z"|"X", "support": [...]}`` error vectors."""
    entries = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            side = doc.get("side", "Z")
            if side not in SIDES:
                raise ValueError(f"{path}:{line_no}: side must be one of {SIDES}, got {side!r}")
            entries.append((side, BitVec.from_support(n, doc["support"])))
    return entries


@dataclass
class SweepReport:
    records: List[TrialRecord]
    summary: pd.DataFrame
    trials_path: str
    summary_path: str

    @property
    def passed(self) -> bool:
        return all(r.gating_ok for r in self.records)


def summarize(records: Iterable[TrialRecord], bundle: CodeBundle) -> pd.DataFrame:
    rows = []
    for r in records:
        rows.append(
            {
                "side": r.side,
                "weight": r.weight,
                "ok": r.status == "ok",
                "success": bool(r.coset_ok),
                "output_weight": r.output_weight,
                "gating_failure": not r.gating_ok,
                "time_s": sum(r.timings.values()),
            }
        )
    columns = ["side", "weight", "trials", "successes", "success_rate", "mean_output_weight",
               "gating_failures", "mean_time_s"]
    if not rows:
        return pd.DataFrame(columns=columns)
    df = pd.DataFrame(rows)
    summary = (
        df.groupby(["side", "weight"], sort=True)
        .agg(
            trials=("success", "size"),
            successes=("success", "sum"),
            mean_output_weight=("output_weight", "mean"),
            gating_failures=("gating_failure", "sum"),
            mean_time_s=("time_s", "mean"),
        )
        .reset_index()
    )
    summary["success_rate"] = summary["successes"] / summary["trials"]
    summary = summary[columns].copy()
    summary["radius"] = bundle.radius.e
    summary["distance"] = bundle.params.d
    summary["lambda"] = bundle.lam
    return summary


def _write_jsonl(records: Iterable[TrialRecord], path: str) -> None:
    out_dir = os.path.dirname(path)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r.to_json_dict(), sort_keys=True) + "\n")


def run_sweep(config: ExperimentConfig, bundle: Optional[CodeBundle] = None) -> SweepReport:
    """Build (or reuse) the code, run trials x weights x sides plus any replay errors, write reports."""
    if bundle is None:
        bundle = build_bundle(config)
        save_bundle(bundle, config.bundle_path)
        print(f"Code bundle saved to {config.bundle_path}")
    n = bundle.product.n
    too_heavy = [w for w in config.error_weights if w > n]
    if too_heavy:
        raise ValueError(f"error weights {too_heavy} exceed the block length {n}")

    tasks: List[Tuple[str, int, int, List[int], Optional[BitVec]]] = []
    trial_id = 0
    for side_idx, side in enumerate(config.sides):
        for weight in config.error_weights:
            for t in range(config.trials):
                tasks.append((side, weight, trial_id, [config.seed, side_idx, weight, t], None))
                trial_id += 1
    if config.replay_path:
        for r_idx, (side, error) in enumerate(load_replay_file(config.replay_path, n)):
            tasks.append((side, error.weight, trial_id, [config.seed, len(SIDES) + SIDES.index(side), r_idx], error))
            trial_id += 1

    def _run(task):
        side, weight, tid, seed, error = task
        rng = np.random.default_rng(seed)
        return run_trial(config, bundle, weight, rng, side=side, trial=tid, seed=seed, error=error)

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        records = list(pool.map(_run, tasks))

    _write_jsonl(records, config.trials_path)
    print(f"Trials saved to {config.trials_path}")

    summary = summarize(records, bundle)
    out_dir = os.path.dirname(config.summary_path)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    summary.to_csv(config.summary_path, index=False)
    print(f"Summary saved to {config.summary_path}")

    report = SweepReport(records, summary, config.trials_path, config.summary_path)
    failures = sum(not r.gating_ok for r in records)
    print(f"{len(records)} trials, {failures} gating failures")
    return report


def run_build(config: ExperimentConfig) -> CodeBundle:
    bundle = build_bundle(config)
    save_bundle(bundle, config.bundle_path)
    p = bundle.params
    print(f"Built {config.mode} code [[{p.n}, {p.k}, {p.d if p.d is not None else '?'}]], locality {p.locality}")
    print(f"Code bundle saved to {config.bundle_path}")
    return bundle


def describe_bundle(bundle: CodeBundle) -> Dict[str, Any]:
    p = bundle.params
    return {
        "mode": bundle.config.mode,
        "n": p.n,
        "k": p.k,
        "distance": p.d,
        "locality": p.locality,
        "factor_locality": bundle.locality,
        "lambda": bundle.lam,
        "proven_regime": bundle.in_proven_regime,
        "budgets": bundle.budgets._asdict(),
        "combined_budgets": bundle.combined._asdict(),
        "gamma": bundle.product_gamma,
        "radius": bundle.radius.e,
        "radius_terms": bundle.radius.terms,
        "radius_distance_bounded": bundle.radius.distance_bounded,
    }


def run_params(config: ExperimentConfig, bundle_path: Optional[str] = None) -> Dict[str, Any]:
    bundle = load_or_build(config, bundle_path)
    info = describe_bundle(bundle)
    print(json.dumps(info, indent=2, sort_keys=True))
    return info


def read_syndrome(path: Optional[str], length: int) -> np.ndarray:
    """Parse a JSON list of set indices from a file, or from stdin when path is None or '-'."""
    if path in (None, "-"):
        raw = sys.stdin.read()
    else:
        with open(path, "r", encoding="utf-8") as f:
            raw = f.read()
    indices = json.loads(raw)
    if not isinstance(indices, list):
        raise ValueError("syndrome must be a JSON list of set indices")
    return BitVec.from_support(length, [int(i) for i in indices]).to_bits()


def run_decode(
    config: ExperimentConfig,
    syndrome_path: Optional[str] = None,
    side: str = "Z",
    bundle_path: Optional[str] = None,
) -> Dict[str, Any]:
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    bundle = load_or_build(config, bundle_path)
    s = read_syndrome(syndrome_path, _syndrome_length(bundle, side))
    outcome = _decode_side(bundle, side, s, np.random.default_rng(config.seed))
    result = {
        "side": side,
        "status": outcome.status,
        "weight": outcome.weight,
        "support": outcome.estimate.support() if outcome.ok else None,
    }
    print(json.dumps(result, sort_keys=True))
    return result
