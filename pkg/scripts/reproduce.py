#!/usr/bin/env python3
# Copyright (c) Meta Platforms, Inc. and affiliates.

# pyre-strict

"""
Batch driver for the network-selection experiments: policy comparisons on every
builtin bandwidth setup, the period-set sweep and the mobility variants.

Desk scale (20 iterations, 5 runs) by default; `--full` uses each scenario's
own 60 iterations and 20 runs, which takes hours.
"""

import argparse
import sys
import time
from pathlib import Path

from loguru import logger
from rich.console import Console

from periodex.cli.main import DEFAULT_SWEEP, parse_period_spec, summary_table
from periodex.exceptions import PeriodexError
from periodex.runner.experiment import compare_policies, run_experiment, sweep_period_sets
from periodex.scenarios.loader import load_scenario, override_scenario
from periodex.scenarios.models import ScenarioConfig
from periodex.utils.timeutil import get_human_delta

COMPARISONS = ("discrete", "continuous", "continuous_hard", "noisy_discrete", "noisy_continuous")
POLICIES = ("periodic_exp4", "exp3", "optimal_random")
EXPERIMENTS = ("compare", "sweep", "mobility")


def _scaled(name: str, args: argparse.Namespace) -> ScenarioConfig:
    scenario = load_scenario(name)
    if args.full:
        return scenario
    return override_scenario(scenario, iterations=args.iterations, runs=args.runs)


def _compare(args: argparse.Namespace, console: Console) -> None:
    for name in COMPARISONS:
        comparison = compare_policies(
            _scaled(name, args),
            POLICIES,
            parallel=args.parallel,
            out_dir=args.out_dir / "compare" / name,
        )
        console.print(summary_table(f"{name}: policies", comparison.summaries))


def _sweep(args: argparse.Namespace, console: Console) -> None:
    scenario = _scaled("discrete", args)
    sweep = sweep_period_sets(
        scenario,
        [parse_period_spec(spec, scenario.period_set.style) for spec in DEFAULT_SWEEP],
        parallel=args.parallel,
        out_dir=args.out_dir / "sweep",
    )
    console.print(summary_table("discrete: period sets", sweep.summaries))


def _mobility(args: argparse.Namespace, console: Console) -> None:
    base = _scaled("mobility", args)
    summaries = {}
    for variant in ("vanilla", "availability_aware"):
        summaries[variant] = run_experiment(
            override_scenario(base, device_variant=variant),
            parallel=args.parallel,
            out_dir=args.out_dir / "mobility",
            prefix=f"{variant}_",
        )
    console.print(summary_table("mobility: device variants", summaries))


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Run the network selection experiments")
    parser.add_argument(
        "--out-dir", type=Path, default=Path("results"), help="Where CSV and JSON files go"
    )
    parser.add_argument("--iterations", type=int, default=20)
    parser.add_argument("--runs", type=int, default=5)
    parser.add_argument("--parallel", type=int, default=4)
    parser.add_argument(
        "--full",
        action="store_true",
        default=False,
        help="Use the scenarios' own iteration and run counts",
    )
    parser.add_argument(
        "--only",
        choices=EXPERIMENTS,
        action="append",
        default=None,
        help="Restrict to some experiments; repeatable",
    )
    parser.add_argument("--verbose", action="store_true", default=False, help="Enable verbose logging")
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> None:
    args = parse_args(argv)
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if args.verbose else "INFO")

    console = Console()
    steps = {"compare": _compare, "sweep": _sweep, "mobility": _mobility}
    start = time.monotonic()
    try:
        for name in args.only or EXPERIMENTS:
            steps[name](args, console)
    except PeriodexError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(1)
    logger.info(f"All experiments done in {get_human_delta(time.monotonic() - start)}")


if __name__ == "__main__":
    main()
