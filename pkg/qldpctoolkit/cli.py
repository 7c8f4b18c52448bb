"""Command-line entry point: ``build``, ``params``, ``decode`` and ``bench`` over one experiment config."""
import argparse
import logging
from typing import Any, Dict

from .config import load_config
from .harness import run_build, run_decode, run_params, run_sweep


def _weights(text: str) -> list:
    return [int(w) for w in text.split(",") if w.strip()]


def _sides(text: str) -> list:
    return [s.strip().upper() for s in text.split(",") if s.strip()]


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="JSON config file (flags override its keys)")
    p.add_argument("--mode", choices=["hgp", "lp"], default=None)
    p.add_argument("--classical", choices=["tanner", "repetition"], default=None,
                   help="Classical factor: random Tanner code or the length-ell cycle code")
    p.add_argument("--ell", type=int, default=None, help="Repetition length / lift order")
    p.add_argument("--lift-ell", dest="lift_ell", type=int, default=None, help="Tanner lift order (hgp mode)")
    p.add_argument("--v0", type=int, default=None, help="Base graph vertex count")
    p.add_argument("--delta", type=int, default=None, help="Base graph degree")
    p.add_argument("--gamma-inner", dest="gamma_inner", type=int, default=None)
    p.add_argument("--d-min", dest="d_min", type=int, default=None)
    p.add_argument("--lambda-target", dest="lambda_target", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--failure-delta", dest="failure_delta", type=float, default=None)
    p.add_argument("--hgp-strategy", dest="hgp_strategy", choices=["deterministic", "randomized"], default=None)
    p.add_argument("--lp-strategy", dest="lp_strategy", choices=["amplified", "weak"], default=None)
    p.add_argument("--weights", dest="error_weights", type=_weights, default=None, help="Comma-separated error weights")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--sides", type=_sides, default=None, help="Comma-separated subset of Z,X")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (QLDPC_SEED overrides)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--oracle-budget", dest="oracle_budget", type=int, default=None)
    p.add_argument("--replay", dest="replay_path", default=None, help="JSON-lines file of explicit errors")
    p.add_argument("--bundle", dest="bundle_path", default=None, help="Code bundle JSON path")
    p.add_argument("--trials-out", dest="trials_path", default=None, help="Trials JSON-lines path")
    p.add_argument("--summary-out", dest="summary_path", default=None, help="Summary CSV path")


_NOT_CONFIG = {"cmd", "config", "verbose", "syndrome", "side"}


def _config_from_args(args: argparse.Namespace):
    overrides: Dict[str, Any] = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
    return load_config(args.config, overrides)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qldpctoolkit",
        description="Quasi-cyclic quantum LDPC toolkit: build product codes, inspect parameters, decode, benchmark.",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_build = sub.add_parser("build", help="Construct and serialize a code bundle")
    _add_config_args(p_build)

    p_params = sub.add_parser("params", help="Print budgets, radii, measured lambda and distance")
    _add_config_args(p_params)

    p_decode = sub.add_parser("decode", help="Decode one syndrome (JSON list of set indices)")
    _add_config_args(p_decode)
    p_decode.add_argument("syndrome", nargs="?", default=None, help="Syndrome file; stdin when omitted or '-'")
    p_decode.add_argument("--side", choices=["Z", "X"], default="Z")

    p_bench = sub.add_parser("bench", help="Run the full trial sweep and write reports")
    _add_config_args(p_bench)

    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    config = _config_from_args(args)

    if args.cmd == "build":
        run_build(config)
    elif args.cmd == "params":
        run_params(config, bundle_path=config.bundle_path)
    elif args.cmd == "decode":
        result = run_decode(config, args.syndrome, side=args.side, bundle_path=config.bundle_path)
        return 0 if result["status"] == "ok" else 1
    elif args.cmd == "bench":
        report = run_sweep(config)
        return 0 if report.passed else 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
