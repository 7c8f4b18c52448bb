import argparse
import json
import os
from typing import Dict, List, Sequence

import numpy as np

from qldpctoolkit.bundle import load_or_build
from qldpctoolkit.config import load_config
from qldpctoolkit.product_decoders import ProductCode


def column_error(product: ProductCode, side: str, weight: int, column: int, rng: np.random.Generator) -> List[int]:
    """Support of an error whose bits all sit in one column of the cyclic direction.

    Z-side errors go in the y block (``A_1 x B_0``), X-side errors in the x block,
    which is the block the dual side decodes as its y block.
    """
    if side == "Z":
        rows, offset = product.rows_y, product.n_x
    elif side == "X":
        rows, offset = product.rows_x, 0
    else:
        raise ValueError(f"side must be 'Z' or 'X', got {side!r}")
    if not 0 <= weight <= rows:
        raise ValueError(f"a single column holds at most {rows} errors, got weight {weight}")
    picked = rng.choice(rows, size=weight, replace=False)
    return sorted(int(offset + r * product.ell + column % product.ell) for r in picked)


def generate_entries(
    product: ProductCode, sides: Sequence[str], weights: Sequence[int], count: int, rng: np.random.Generator
) -> List[Dict]:
    entries = []
    for side in sides:
        for w in weights:
            for _ in range(count):
                column = int(rng.integers(product.ell))
                support = column_error(product, side, w, column, rng)
                entries.append({"side": side, "support": support, "kind": "column", "column": column})
    return entries


def main():
    parser = argparse.ArgumentParser(
        description="Write a JSON-lines replay file of errors concentrated on one repetition column."
    )
    parser.add_argument("--config", default=None, help="Experiment config JSON")
    parser.add_argument("--bundle", default=None, help="Existing code bundle (built from the config when missing)")
    parser.add_argument("--weights", default="1,2", help="Comma-separated error weights")
    parser.add_argument("--count", type=int, default=5, help="Errors per side and weight")
    parser.add_argument("--sides", default="Z,X", help="Comma-separated subset of Z,X")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="results/replay.jsonl", help="Output JSON-lines path")
    args = parser.parse_args()

    config = load_config(args.config)
    bundle = load_or_build(config, args.bundle)
    weights = [int(w) for w in args.weights.split(",") if w.strip()]
    sides = [s.strip().upper() for s in args.sides.split(",") if s.strip()]
    entries = generate_entries(bundle.product, sides, weights, args.count, np.random.default_rng(args.seed))

    out_dir = os.path.dirname(args.out)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as f:
        for entry in entries:
            f.write(json.dumps(entry, sort_keys=True) + "\n")
    print(f"Replay file saved to {args.out} ({len(entries)} errors)")


if __name__ == "__main__":
    main()
