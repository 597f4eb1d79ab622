"""Command-line harness: table1 | table2 | table3 | sweep | verify.

Exit codes: 0 success, 1 cell or verification failures, 2 usage errors.
The worker pool size honors the SCPKIT_THREADS environment variable.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import bench
from .verify import run_all


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=0, help="base RNG seed")
    sub.add_argument("--reps", type=int, default=10, help="repetitions per grid cell")
    sub.add_argument("--epsilon", type=float, default=1e-4, help="termination tolerance")
    sub.add_argument("--out", type=str, default=None, help="results CSV path")
    sub.add_argument("--full", action="store_true",
                     help="paper-scale grids instead of desk-scale defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scpkit",
        description="cutting-plane and subsampled cutting-plane benchmark harness",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    t1 = subs.add_parser("table1", help="synthetic sparse-regression grid")
    _common_flags(t1)

    t2 = subs.add_parser("table2", help="covertype SVM grid")
    _common_flags(t2)
    t2.add_argument("--covertype", type=str, required=True,
                    help="path to the covertype csv (optionally gzipped)")
    t2.add_argument("--C", type=float, default=1e6, help="SVM regularization weight")

    t3 = subs.add_parser("table3", help="stochastic knapsack grid")
    _common_flags(t3)

    sw = subs.add_parser("sweep", help="sample-size sweep")
    _common_flags(sw)
    sw.add_argument("--family", choices=("sparsereg", "sskp"), required=True)

    subs.add_parser("verify", help="run every derived-oracle and invariant suite")
    return parser


def _report(outcome: bench.GridOutcome, out_path: str | None) -> int:
    print(f"{len(outcome.rows)} result rows", end="")
    print(f" -> {out_path}" if out_path else "")
    for failure in outcome.failures:
        print(failure, file=sys.stderr)
    return 0 if outcome.ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "verify":
        failures = run_all(verbose=True)
        return 1 if failures else 0

    if args.command == "table1":
        plan = bench.ExperimentPlan(
            family="sparsereg", cells=bench.table1_cells(args.full),
            repetitions=args.reps, base_seed=args.seed, epsilon=args.epsilon,
            out_path=args.out)
        return _report(bench.run_table1(plan), args.out)

    if args.command == "table3":
        plan = bench.ExperimentPlan(
            family="sskp", cells=bench.table3_cells(args.full),
            repetitions=args.reps, base_seed=args.seed, epsilon=args.epsilon,
            out_path=args.out)
        return _report(bench.run_table3(plan), args.out)

    if args.command == "table2":
        if not os.path.exists(args.covertype):
            print(f"covertype file not found: {args.covertype}", file=sys.stderr)
            return 2
        plan = bench.ExperimentPlan(
            family="svm", cells=bench.table2_cells(args.full),
            repetitions=args.reps, base_seed=args.seed, epsilon=args.epsilon,
            out_path=args.out)
        return _report(bench.run_table2(plan, args.covertype, C=args.C), args.out)

    if args.command == "sweep":
        plan = bench.ExperimentPlan(
            family=args.family, cells=bench.sweep_cells(args.family, args.full),
            repetitions=args.reps, base_seed=args.seed, epsilon=args.epsilon,
            out_path=args.out)
        grid = bench.sweep_n_grid(args.family, args.full)
        return _report(bench.run_samplesize_sweep(plan, grid), args.out)

    return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
