# Copyright (c) Meta Platforms, Inc. and affiliates.

# pyre-strict

from __future__ import annotations

import functools
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

import click
from loguru import logger
from rich.console import Console
from rich.table import Table

from ..core.partitions import PartitionStyle
from ..core.policies import PolicyName
from ..exceptions import ScenarioConfigError
from ..runner.experiment import compare_policies, run_experiment, sweep_period_sets
from ..runner.summary import RunSummary
from ..scenarios.loader import dump_scenario, list_builtins, load_scenario, override_scenario
from ..scenarios.models import PeriodSetConfig, ScenarioConfig

EXIT_CONFIG_ERROR = 1
EXIT_RUNTIME_ERROR = 2

DEFAULT_SWEEP = ("1", "4", "1-15", "1-24", "1-45")

_VARIANTS = {"as-written": "as_written", "corrected": "corrected"}
_NUMERIC = {"exact": "exact_logsumexp", "max": "max_approx"}
_DEVICE_VARIANTS = {"vanilla": "vanilla", "availability-aware": "availability_aware"}


def _configure_logging(verbose: bool) -> None:
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else "INFO")


def _fail(message: str, code: int) -> None:
    print(message, file=sys.stderr, flush=True)
    sys.exit(code)


def _guarded(func: Callable[..., None]) -> Callable[..., None]:
    """Map config problems to exit code 1 and everything else to 2."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        try:
            func(*args, **kwargs)
        except ScenarioConfigError as e:
            _fail(f"Invalid configuration: {e}", EXIT_CONFIG_ERROR)
        except Exception as e:
            _fail(f"Run failed: {type(e).__name__}: {e}", EXIT_RUNTIME_ERROR)

    return wrapper


def scenario_options(func: Callable[..., None]) -> Callable[..., None]:
    options = [
        click.option(
            "--scenario",
            "scenario_ref",
            required=True,
            help="Builtin scenario name or path to a YAML/JSON scenario file",
        ),
        click.option("--iterations", type=click.IntRange(min=1), default=None),
        click.option(
            "--period-max",
            type=click.IntRange(min=1),
            default=None,
            help="Use the period set {1..N}",
        ),
        click.option("--variant", type=click.Choice(sorted(_VARIANTS)), default=None),
        click.option("--numeric", type=click.Choice(sorted(_NUMERIC)), default=None),
        click.option(
            "--device-variant", type=click.Choice(sorted(_DEVICE_VARIANTS)), default=None
        ),
        click.option("--verbose", is_flag=True, default=False, help="Enable verbose logs"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def run_options(func: Callable[..., None]) -> Callable[..., None]:
    options = [
        click.option("--runs", type=click.IntRange(min=1), default=None),
        click.option("--seed", type=click.IntRange(min=0), default=None, help="Master seed"),
        click.option(
            "--out-dir",
            type=click.Path(file_okay=False, path_type=Path),
            default=None,
            help="Directory for per-run CSV files and summary JSON",
        ),
        click.option("--parallel", type=click.IntRange(min=1), default=1),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def resolve_scenario(
    scenario_ref: str,
    *,
    iterations: int | None = None,
    period_max: int | None = None,
    variant: str | None = None,
    numeric: str | None = None,
    device_variant: str | None = None,
    policy: str | None = None,
    runs: int | None = None,
    seed: int | None = None,
) -> ScenarioConfig:
    scenario = load_scenario(scenario_ref)
    period_set = None
    if period_max is not None:
        period_set = {"style": scenario.period_set.style.value, "max_period": period_max}
    return override_scenario(
        scenario,
        iterations=iterations,
        period_set=period_set,
        device_variant=_DEVICE_VARIANTS.get(device_variant or ""),
        runs=runs,
        seed=seed,
        **{
            "policy.variant": _VARIANTS.get(variant or ""),
            "policy.numeric_mode": _NUMERIC.get(numeric or ""),
            "policy.name": policy,
        },
    )


def parse_period_spec(spec: str, style: PartitionStyle = PartitionStyle.CONTIGUOUS) -> PeriodSetConfig:
    """`1-15` is the range {1..15}; `4` or `2,3,5` are explicit period lists."""
    text = spec.strip()
    try:
        if "-" in text:
            low, high = (int(part) for part in text.split("-", 1))
            if low == 1:
                return PeriodSetConfig(style=style, max_period=high)
            return PeriodSetConfig(style=style, periods=list(range(low, high + 1)))
        return PeriodSetConfig(
            style=style, periods=[int(part) for part in text.split(",") if part]
        )
    except ValueError as e:
        raise ScenarioConfigError(
            f"bad period set {spec!r}: {e}", [f"periods: bad period set {spec!r}"]
        ) from None


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def summary_table(title: str, summaries: dict[str, RunSummary]) -> Table:
    table = Table(title=title)
    for column in (
        "name",
        "runs",
        "distance it.1 (%)",
        "distance final (%)",
        "median GB",
        "std GB",
        "regret mean",
    ):
        table.add_column(column, justify="left" if column == "name" else "right")
    for name, summary in summaries.items():
        table.add_row(
            name,
            str(summary.runs),
            _fmt(summary.first_iteration_distance),
            _fmt(summary.final_iteration_distance),
            _fmt(summary.median_gb),
            _fmt(summary.std_gb),
            _fmt(summary.regret.mean),
        )
    return table


@click.group()
def main() -> None:  # noqa: D401
    """Periodic EXP4 network selection experiments"""
    pass


@main.command("list")
def list_cmd() -> None:
    """List the builtin scenarios."""
    table = Table(title="Builtin scenarios")
    table.add_column("name")
    table.add_column("devices", justify="right")
    table.add_column("networks", justify="right")
    table.add_column("slots", justify="right")
    for name in list_builtins():
        scenario = load_scenario(name)
        table.add_row(
            name,
            str(scenario.num_devices),
            str(scenario.num_networks),
            f"{scenario.iterations} x {scenario.iteration_length}",
        )
    Console().print(table)


@main.command("show")
@scenario_options
@_guarded
def show_cmd(scenario_ref: str, verbose: bool, **overrides: Any) -> None:
    """Print the resolved scenario as YAML."""
    _configure_logging(verbose)
    click.echo(dump_scenario(resolve_scenario(scenario_ref, **overrides)), nl=False)


@main.command("run")
@scenario_options
@run_options
@click.option(
    "--policy", type=click.Choice([p.value for p in PolicyName]), default=None
)
@_guarded
def run_cmd(
    scenario_ref: str,
    verbose: bool,
    runs: int | None,
    seed: int | None,
    out_dir: Path | None,
    parallel: int,
    policy: str | None,
    **overrides: Any,
) -> None:
    """Run one policy configuration over seeded runs."""
    _configure_logging(verbose)
    scenario = resolve_scenario(scenario_ref, policy=policy, runs=runs, seed=seed, **overrides)
    summary = run_experiment(scenario, parallel=parallel, out_dir=out_dir)
    Console().print(summary_table(scenario.name, {summary.policy: summary}))


@main.command("compare")
@scenario_options
@run_options
@click.option(
    "--policy",
    "policies",
    multiple=True,
    type=click.Choice([p.value for p in PolicyName]),
    help="Repeat to compare several policies",
)
@_guarded
def compare_cmd(
    scenario_ref: str,
    verbose: bool,
    runs: int | None,
    seed: int | None,
    out_dir: Path | None,
    parallel: int,
    policies: Sequence[str],
    **overrides: Any,
) -> None:
    """Run several policies on identical seeds."""
    _configure_logging(verbose)
    scenario = resolve_scenario(scenario_ref, runs=runs, seed=seed, **overrides)
    chosen = list(policies) or ["periodic_exp4", "exp3", "optimal_random"]
    comparison = compare_policies(scenario, chosen, parallel=parallel, out_dir=out_dir)
    Console().print(summary_table(f"{scenario.name}: policies", comparison.summaries))


@main.command("sweep")
@scenario_options
@run_options
@click.option(
    "--periods",
    "period_specs",
    multiple=True,
    help="Period set such as 1-15, 4 or 2,3; repeat for several sets",
)
@_guarded
def sweep_cmd(
    scenario_ref: str,
    verbose: bool,
    runs: int | None,
    seed: int | None,
    out_dir: Path | None,
    parallel: int,
    period_specs: Sequence[str],
    **overrides: Any,
) -> None:
    """Compare period sets for Periodic EXP4."""
    _configure_logging(verbose)
    scenario = resolve_scenario(scenario_ref, runs=runs, seed=seed, **overrides)
    period_sets = [
        parse_period_spec(spec, scenario.period_set.style)
        for spec in (period_specs or DEFAULT_SWEEP)
    ]
    sweep = sweep_period_sets(scenario, period_sets, parallel=parallel, out_dir=out_dir)
    Console().print(summary_table(f"{scenario.name}: period sets", sweep.summaries))


if __name__ == "__main__":
    main()
