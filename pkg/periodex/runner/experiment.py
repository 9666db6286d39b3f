# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict
"""
Seeded experiment orchestration: independent runs fanned out over a process
pool, aggregated in run order once all of them are back.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel

from ..core.policies import PolicyName
from ..netsim.records import write_records_csv
from ..netsim.simulator import compile_scenario, run_simulation
from ..scenarios.loader import override_scenario
from ..scenarios.models import PeriodSetConfig, ScenarioConfig
from ..utils.asyncio import await_sync, gather_in_executor
from ..utils.timeutil import get_human_delta
from .summary import RunOutcome, RunSummary, summarize, write_summary


class PolicyComparison(BaseModel):
    scenario: str
    summaries: dict[str, RunSummary]


class PeriodSetSweep(BaseModel):
    scenario: str
    summaries: dict[str, RunSummary]


def _policy_label(scenario: ScenarioConfig) -> str:
    names = sorted({device.policy.value for device in scenario.devices()})
    return "+".join(names)


def execute_run(
    scenario: ScenarioConfig,
    master_seed: int,
    run_index: int,
    out_dir: Path | None = None,
    prefix: str = "",
) -> RunOutcome:
    """One run; module-level so the process pool can pickle it."""
    result = run_simulation(scenario, master_seed, run_index)
    records_file = None
    if out_dir is not None:
        name = f"{prefix}run_{run_index:03d}.csv"
        write_records_csv(
            out_dir / name, result.iter_records(), result.device_ids, result.network_ids
        )
        records_file = name
    return RunOutcome(
        run_index=run_index,
        seed=master_seed,
        cumulative_gb=result.cumulative_gb().tolist(),
        iteration_distance=result.per_iteration_distance().tolist(),
        regrets=result.device_regret(),
        clipped_rewards=result.clipped_rewards,
        records_file=records_file,
    )


async def _run_all(
    scenario: ScenarioConfig,
    master_seed: int,
    runs: int,
    parallel: int,
    out_dir: Path | None,
    prefix: str,
) -> list[RunOutcome]:
    calls = [(scenario, master_seed, i, out_dir, prefix) for i in range(runs)]
    if parallel <= 1 or runs == 1:
        return [execute_run(*args) for args in calls]
    with ProcessPoolExecutor(max_workers=min(parallel, runs)) as pool:
        return await gather_in_executor(pool, execute_run, calls)


def run_experiment(
    scenario: ScenarioConfig,
    runs: int | None = None,
    parallel: int = 1,
    out_dir: Path | None = None,
    master_seed: int | None = None,
    prefix: str = "",
) -> RunSummary:
    """
    Run `runs` seeded simulations (default: the scenario's own count). Run i
    always uses seed (master_seed, i), so outputs do not depend on scheduling.
    With `out_dir`, writes one CSV per run and `<prefix>summary.json`.
    """
    runs = runs or scenario.runs
    seed = scenario.seed if master_seed is None else master_seed
    plan = compile_scenario(scenario)
    logger.info(
        f"Running {scenario.name}: {runs} runs x {plan.horizon} slots, "
        f"{plan.num_devices} devices, {plan.num_networks} networks, seed {seed}"
    )
    start = time.monotonic()
    outcomes = await_sync(_run_all(scenario, seed, runs, parallel, out_dir, prefix))
    summary = summarize(
        outcomes,
        scenario=scenario.name,
        policy=_policy_label(scenario),
        period_set=scenario.period_set.label(),
        master_seed=seed,
        device_ids=plan.device_ids(),
    )
    logger.info(
        f"Finished {scenario.name} ({summary.policy}) in {get_human_delta(time.monotonic() - start)}"
    )
    if out_dir is not None:
        path = write_summary(out_dir / f"{prefix}summary.json", summary)
        logger.info(f"Wrote {len(summary.records_files)} record files and {path}")
    return summary


def with_policy(scenario: ScenarioConfig, policy: PolicyName | str) -> ScenarioConfig:
    """Every device on `policy`, dropping per-group overrides."""
    groups = [
        {**group.model_dump(mode="json", exclude_none=True), "policy": None}
        for group in scenario.device_groups
    ]
    return override_scenario(
        scenario, **{"policy.name": PolicyName(policy).value, "device_groups": groups}
    )


def compare_policies(
    scenario: ScenarioConfig,
    policies: Sequence[PolicyName | str],
    runs: int | None = None,
    parallel: int = 1,
    out_dir: Path | None = None,
    master_seed: int | None = None,
) -> PolicyComparison:
    """
    Run each policy on the same seeds. The environment generator is seeded
    identically for every policy, so the noise is shared across them.
    """
    summaries: dict[str, RunSummary] = {}
    for policy in policies:
        name = PolicyName(policy).value
        summaries[name] = run_experiment(
            with_policy(scenario, name),
            runs=runs,
            parallel=parallel,
            out_dir=out_dir,
            master_seed=master_seed,
            prefix=f"{name}_",
        )
    comparison = PolicyComparison(scenario=scenario.name, summaries=summaries)
    if out_dir is not None:
        write_summary(out_dir / "comparison.json", comparison)
    return comparison


def sweep_period_sets(
    scenario: ScenarioConfig,
    period_sets: Sequence[PeriodSetConfig],
    runs: int | None = None,
    parallel: int = 1,
    out_dir: Path | None = None,
    master_seed: int | None = None,
) -> PeriodSetSweep:
    summaries: dict[str, RunSummary] = {}
    for index, period_set in enumerate(period_sets):
        variant = override_scenario(
            scenario, period_set=period_set.model_dump(mode="json", exclude_none=True)
        )
        label = period_set.label()
        summaries[label] = run_experiment(
            variant,
            runs=runs,
            parallel=parallel,
            out_dir=out_dir,
            master_seed=master_seed,
            prefix=f"set{index + 1}_",
        )
    sweep = PeriodSetSweep(scenario=scenario.name, summaries=summaries)
    if out_dir is not None:
        write_summary(out_dir / "sweep.json", sweep)
    return sweep


def iteration_slope(series: Sequence[float]) -> float:
    """Least-squares slope of a per-iteration series."""
    values = np.asarray(series, dtype=float)
    if values.shape[0] < 2:
        return 0.0
    return float(np.polyfit(np.arange(values.shape[0]), values, 1)[0])
