"""Wall-clock shape of the flip decoder and the weak lifted-product decoder across lift orders.

Report only: the ratios are printed and saved, never checked.
"""
import argparse
import logging
import os
import time
from typing import Callable, Optional, Sequence

import numpy as np
import pandas as pd

from qldpctoolkit.f2 import BitVec
from qldpctoolkit.flip_decoders import nsdec_chain
from qldpctoolkit.product_decoders import lp_product, weak_dec
from qldpctoolkit.tanner import InnerCode, random_tanner_code

logger = logging.getLogger(__name__)


def _mean_seconds(fn: Callable[[], object], repeats: int) -> float:
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def runtime_table(
    ells: Sequence[int],
    v0: int = 8,
    delta: int = 6,
    gamma: int = 3,
    d_min: int = 3,
    repeats: int = 5,
    seed: int = 0,
    weak: bool = True,
) -> pd.DataFrame:
    """One row per lift order with mean decode times and their ratios to the previous row.

    ``weak_dec_model`` is the ratio ``l (n_A l + |E|)`` predicts; ``weak_dec_band`` is the
    measured ratio over the predicted one (a linear-time decoder stays within [0.5, 2]).
    """
    rng = np.random.default_rng(seed)
    inner: Optional[InnerCode] = None
    rows = []
    for ell in sorted(ells):
        code = random_tanner_code(v0, delta, ell, rng, inner=inner, gamma=gamma, d_min=d_min, max_lift_tries=1)
        inner = code.inner
        edges = rng.choice(code.n_bits, size=min(3, code.n_bits), replace=False)
        s = code.syndrome(BitVec.from_support(code.n_bits, edges.tolist()))
        flip_s = _mean_seconds(lambda: nsdec_chain(code, s), repeats)
        row = {"ell": ell, "n_edges": code.n_bits, "flip_s": flip_s, "flip_s_per_edge": flip_s / code.n_bits}
        if weak and not ell & (ell - 1):
            product = lp_product(code)
            c = np.zeros(product.n, dtype=np.uint8)
            c[rng.integers(product.n)] = 1
            syndrome = product.syndrome_of(c)
            run_rng = np.random.default_rng(seed)
            row["weak_dec_s"] = _mean_seconds(lambda: weak_dec(product, syndrome, run_rng), repeats)
            row["work"] = ell * (product.rows_y * ell + code.n_bits)
        rows.append(row)
        logger.info("ell=%d: flip %.3g s", ell, flip_s)

    df = pd.DataFrame(rows)
    df["flip_ratio"] = df["flip_s"] / df["flip_s"].shift(1)
    df["edge_ratio"] = df["n_edges"] / df["n_edges"].shift(1)
    if "weak_dec_s" in df:
        df["weak_dec_ratio"] = df["weak_dec_s"] / df["weak_dec_s"].shift(1)
        df["weak_dec_model"] = df["work"] / df["work"].shift(1)
        df["weak_dec_band"] = df["weak_dec_ratio"] / df["weak_dec_model"]
    return df


def main():
    parser = argparse.ArgumentParser(description="Time the flip and weak decoders across lift orders (report only).")
    parser.add_argument("--ells", default="16,32,64,128", help="Comma-separated lift orders")
    parser.add_argument("--v0", type=int, default=8)
    parser.add_argument("--delta", type=int, default=6)
    parser.add_argument("--gamma", type=int, default=3)
    parser.add_argument("--repeats", type=int, default=5, help="Decodes averaged per measurement")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--no-weak", action="store_true", help="Skip the weak lifted-product decoder")
    parser.add_argument("--out", default="results/runtime.csv", help="Output CSV path")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)

    ells = [int(e) for e in args.ells.split(",") if e.strip()]
    df = runtime_table(ells, args.v0, args.delta, args.gamma, repeats=args.repeats, seed=args.seed, weak=not args.no_weak)

    out_dir = os.path.dirname(args.out)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    df.to_csv(args.out, index=False)
    print(df.to_string(index=False))
    print(f"Runtime report saved to {args.out}")


if __name__ == "__main__":
    main()
