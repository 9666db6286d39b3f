# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from pydantic import BaseModel, Field

from ..core.regret import RegretAggregate, RegretReport, aggregate_reports

# decimals kept in summary JSON; repeated runs must serialize identically
JSON_DECIMALS = 9


class RunOutcome(BaseModel):
    """What a single seeded run reports back to `run_experiment`."""

    run_index: int
    seed: int
    cumulative_gb: list[float] = Field(..., description="Per-device download in GB")
    iteration_distance: list[float] = Field(
        ..., description="Mean distance to the optimal minimum per iteration (%)"
    )
    regrets: list[RegretReport] = Field(
        default_factory=list, description="Per-device regret vs generalized periodic OPT"
    )
    clipped_rewards: int = 0
    records_file: str | None = None


class RunSummary(BaseModel):
    scenario: str
    policy: str
    period_set: str
    runs: int
    master_seed: int
    device_ids: list[str]
    cumulative_gb: list[list[float]] = Field(..., description="runs x devices, GB")
    median_gb: float
    std_gb: float
    min_gb: float
    max_gb: float
    iteration_distance: list[float] = Field(
        ..., description="Per-iteration distance to the optimal minimum, mean over runs (%)"
    )
    regret: RegretAggregate
    records_files: list[str] = Field(default_factory=list)

    @property
    def first_iteration_distance(self) -> float:
        return self.iteration_distance[0]

    @property
    def final_iteration_distance(self) -> float:
        return self.iteration_distance[-1]


def summarize(
    outcomes: Sequence[RunOutcome],
    *,
    scenario: str,
    policy: str,
    period_set: str,
    master_seed: int,
    device_ids: Sequence[str],
) -> RunSummary:
    """Aggregate per-run outcomes, in run order."""
    ordered = sorted(outcomes, key=lambda outcome: outcome.run_index)
    gb = np.array([outcome.cumulative_gb for outcome in ordered], dtype=float)
    distance = np.array([outcome.iteration_distance for outcome in ordered], dtype=float)
    reports = [report for outcome in ordered for report in outcome.regrets]
    return RunSummary(
        scenario=scenario,
        policy=policy,
        period_set=period_set,
        runs=len(ordered),
        master_seed=master_seed,
        device_ids=list(device_ids),
        cumulative_gb=gb.tolist(),
        median_gb=float(np.median(gb)),
        std_gb=float(np.std(gb)),
        min_gb=float(gb.min()),
        max_gb=float(gb.max()),
        iteration_distance=distance.mean(axis=0).tolist(),
        regret=aggregate_reports(reports),
        records_files=[o.records_file for o in ordered if o.records_file is not None],
    )


def _round_floats(value: Any) -> Any:
    if isinstance(value, float):
        return round(value, JSON_DECIMALS) + 0.0
    if isinstance(value, dict):
        return {key: _round_floats(item) for key, item in value.items()}
    if isinstance(value, list):
        return [_round_floats(item) for item in value]
    return value


def dumps_summary(payload: BaseModel | dict[str, Any]) -> str:
    """Sorted keys and fixed float precision so equal runs give equal bytes."""
    data = payload.model_dump(mode="json") if isinstance(payload, BaseModel) else payload
    if not isinstance(data, dict):
        raise TypeError("summary payload must serialize to a mapping")
    data = {
        key: (item.model_dump(mode="json") if isinstance(item, BaseModel) else item)
        for key, item in data.items()
    }
    return json.dumps(_round_floats(data), sort_keys=True, indent=2) + "\n"


def write_summary(path: Path, payload: BaseModel | dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_summary(payload), encoding="utf-8")
    return path
