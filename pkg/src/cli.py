"""
Command-line front-end.

    python hermspde.py <command> CONFIG [--seed S] [--paths P] [--out DIR] [options]

Exit codes: 0 success, 2 configuration error, 3 solver failure,
4 simulation blow-up, 5 a proven inequality failed numerically.
"""
import argparse
import logging
import sys
from typing import List, Optional

from src.experiment.models import apply_overrides, load_config
from src.experiment.runner import ExperimentRunner
from src.utils.errors import HermspdeError
from src.utils.log import configure_logging
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)

COMMANDS = ("monotonicity", "stability", "invariant", "embedding", "oracle-compare", "report")


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="hermspde",
        description="Hermite-Sobolev spectral diagnostics for linear SPDEs in S'.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="Experiment JSON file")
    common.add_argument("--seed", type=int, help="Override sim.seed")
    common.add_argument("--paths", type=int, help="Override sim.paths")
    common.add_argument("--out", help="Override output_dir")
    common.add_argument("--log-level", help="Logging level (default HERMSPDE_LOG_LEVEL)")

    sub = parser.add_subparsers(dest="command", required=True)
    mono = sub.add_parser("monotonicity", parents=[common], help="Constants table over (p, p-2, q-2) x N")
    mono.add_argument("--N", dest="N_list", type=int, nargs="+", help="Truncations (default [4, 8, 16])")
    sub.add_parser("stability", parents=[common], help="Exponential mean-square stability run")
    sub.add_parser("invariant", parents=[common], help="Tail mass and ergodic averages")
    emb = sub.add_parser("embedding", parents=[common], help="Compact-embedding bound sweep")
    emb.add_argument("--n", dest="n_list", type=int, nargs="+", help="Projection orders")
    emb.add_argument("--trials", type=int, default=1000, help="Random vectors per (p, q, n)")
    oracle = sub.add_parser("oracle-compare", parents=[common], help="Strong error against the exact solution")
    oracle.add_argument("--dt", dest="dts", type=float, nargs="+", help="Step sizes")
    sub.add_parser("report", parents=[common], help="PDF summary of the JSON reports in output_dir")
    return parser.parse_args(argv)


def run(args: argparse.Namespace) -> int:
    config = apply_overrides(load_config(args.config), seed=args.seed, paths=args.paths, out=args.out)
    runner = ExperimentRunner(config)
    if args.command == "monotonicity":
        runner.monotonicity(args.N_list)
    elif args.command == "stability":
        runner.stability()
    elif args.command == "invariant":
        runner.invariant()
    elif args.command == "embedding":
        runner.embedding(args.n_list, args.trials)
    elif args.command == "oracle-compare":
        runner.oracle_compare(args.dts)
    else:
        runner.report()
    logger.info(f"{args.command} finished; outputs in {runner.output_dir}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = _parse_args(argv)
    try:
        configure_logging(args.log_level or get_settings().log_level)
        return run(args)
    except HermspdeError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
