"""Command-line entry point: ``nnsimplify <input.nnet> --out ... --report ...``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import __version__
from .errors import InputUnreadable, InvalidConfig
from .pipeline import PipelineConfig, run, strict_deviation_alarm

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DEVIATION = 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nnsimplify",
        description="Remove provably dead hidden neurons from an NNet ReLU network.",
    )
    parser.add_argument("input", help="network to simplify, NNet format")
    parser.add_argument("--out", required=True, help="where to write the simplified network")
    parser.add_argument("--report", required=True, help="where to write the JSON report")
    parser.add_argument("--simulations", type=int, default=20000, help="random simulations (default 20000)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--mode", choices=["strict", "epsilon"], default="strict")
    parser.add_argument("--epsilon", type=float, default=0.01, help="threshold in epsilon mode (default 0.01)")
    parser.add_argument("--timeout", type=float, default=60.0, help="seconds per query; 0 disables (default 60)")
    parser.add_argument("--budget", type=int, default=10**6, help="branch-and-bound regions per query (default 1e6)")
    parser.add_argument("--jobs", type=int, default=None, help="worker processes (default $NNSIMPLIFY_JOBS or CPU count)")
    parser.add_argument(
        "--allow-approximate",
        action="store_true",
        help="accept removals proved only in epsilon mode (output may change by a bounded amount)",
    )
    parser.add_argument("--equivalence-samples", type=int, default=10_000)
    parser.add_argument("--no-timings", action="store_true", help="omit wall times so reports are reproducible")
    parser.add_argument("-q", "--quiet", action="store_true", help="no per-query log lines")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def _jobs(value):
    if value is not None:
        return value
    env = os.environ.get("NNSIMPLIFY_JOBS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InvalidConfig(f"NNSIMPLIFY_JOBS={env!r} is not an integer") from None
    return None


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(message)s",
        stream=sys.stderr,
    )
    try:
        config = PipelineConfig(
            input_path=args.input,
            output_path=args.out,
            report_path=args.report,
            simulations=args.simulations,
            seed=args.seed,
            mode=args.mode,
            epsilon=args.epsilon,
            timeout=args.timeout,
            budget=args.budget,
            workers=_jobs(args.jobs),
            allow_approximate=args.allow_approximate,
            equivalence_samples=args.equivalence_samples,
        )
        report = run(config, timings=not args.no_timings)
    except (InputUnreadable, InvalidConfig) as exc:
        print(f"nnsimplify: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    totals = report.totals
    print(
        f"candidates {totals['candidates']}: dead {totals['dead']}, alive {totals['alive']}, "
        f"unknown {totals['unknown']}; removed {totals['removed']} of {totals['original_hidden']} "
        f"hidden neurons ({totals['reduction_percent']:.1f}%)"
    )
    if strict_deviation_alarm(report):
        print(
            f"nnsimplify: equivalence check found deviation {report.equivalence['max_deviation']}",
            file=sys.stderr,
        )
        return EXIT_DEVIATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
