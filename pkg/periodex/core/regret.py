# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict
"""
Offline OPT baselines and regret over a full reward table.

Arms are zero-based everywhere; ties are broken towards the lowest arm index
(and the earliest partition function), so witnesses are deterministic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from pydantic import BaseModel, Field

from ..exceptions import PartitionError
from .partitions import PartitionFunction, PartitionSet


@dataclass(frozen=True, eq=False)
class RewardMatrix:
    """values[i, t]: reward of arm i at step t+1, in [0, 1]."""

    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 2 or self.values.size == 0:
            raise ValueError("a reward matrix must be a non-empty K x T table")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("rewards must be finite")
        if np.any(self.values < 0.0) or np.any(self.values > 1.0):
            raise ValueError("rewards must lie in [0, 1]")

    @property
    def num_arms(self) -> int:
        return int(self.values.shape[0])

    @property
    def horizon(self) -> int:
        return int(self.values.shape[1])

    def to_csv(self, path: Path | str) -> None:
        np.savetxt(path, self.values, delimiter=",", fmt="%.17g")

    @classmethod
    def from_csv(cls, path: Path | str) -> "RewardMatrix":
        return cls(values=np.loadtxt(path, delimiter=",", dtype=float, ndmin=2))


class OptWitness(BaseModel):
    partition: str | None = Field(None, description="Name of the winning partition function")
    partition_index: int | None = Field(None, description="Index of the winner in F")
    theta: list[int] = Field(default_factory=list, description="Best arm per label")


class OptResult(BaseModel):
    total: float
    witness: OptWitness


class RegretReport(BaseModel):
    opt_total: float
    alg_total: float
    regret: float
    witness: OptWitness | None = None


class RegretAggregate(BaseModel):
    runs: int
    mean: float
    std: float


def _check_horizon(f: PartitionFunction, rm: RewardMatrix) -> None:
    if f.horizon != rm.horizon:
        raise PartitionError(
            f"horizon mismatch: partition has {f.horizon} steps, rewards have {rm.horizon}"
        )


def weak_opt(rm: RewardMatrix) -> tuple[int, float]:
    totals = rm.values.sum(axis=1)
    arm = int(np.argmax(totals))
    return arm, float(totals[arm])


def full_opt(rm: RewardMatrix) -> float:
    return float(rm.values.max(axis=0).sum())


def label_reward_sums(f: PartitionFunction, rm: RewardMatrix) -> np.ndarray:
    """K x P_f table of sum_{t in f^-1(l)} x_i(t)."""
    _check_horizon(f, rm)
    return np.stack(
        [
            np.bincount(f.labels - 1, weights=row, minlength=f.num_labels)
            for row in rm.values
        ]
    )


def periodic_opt(f: PartitionFunction, rm: RewardMatrix) -> OptResult:
    sums = label_reward_sums(f, rm)
    theta = np.argmax(sums, axis=0)
    total = float(sums[theta, np.arange(f.num_labels)].sum())
    return OptResult(
        total=total, witness=OptWitness(partition=f.name or None, theta=theta.tolist())
    )


def brute_force_periodic_opt(f: PartitionFunction, rm: RewardMatrix) -> float:
    """Exhaustive maximization over every theta: f([T]) -> [K]."""
    _check_horizon(f, rm)
    steps = np.arange(rm.horizon)
    best = -math.inf
    for theta in itertools.product(range(rm.num_arms), repeat=f.num_labels):
        arms = np.asarray(theta)[f.labels - 1]
        best = max(best, float(rm.values[arms, steps].sum()))
    return best


def generalized_periodic_opt(F: PartitionSet, rm: RewardMatrix) -> OptResult:
    if len(F) == 0:
        raise PartitionError("generalized periodic OPT needs a non-empty period set")
    best: OptResult | None = None
    for index, f in enumerate(F):
        result = periodic_opt(f, rm)
        if best is None or result.total > best.total:
            result.witness.partition_index = index
            best = result
    assert best is not None
    return best


def regret_of_trace(
    opt_total: float, trace: Sequence[float] | np.ndarray, witness: OptWitness | None = None
) -> RegretReport:
    alg_total = float(np.sum(trace))
    return RegretReport(
        opt_total=opt_total,
        alg_total=alg_total,
        regret=opt_total - alg_total,
        witness=witness,
    )


def weak_regret(rm: RewardMatrix, trace: Sequence[float] | np.ndarray) -> RegretReport:
    arm, total = weak_opt(rm)
    return regret_of_trace(total, trace, OptWitness(theta=[arm]))


def full_regret(rm: RewardMatrix, trace: Sequence[float] | np.ndarray) -> RegretReport:
    return regret_of_trace(full_opt(rm), trace)


def periodic_regret(
    f: PartitionFunction, rm: RewardMatrix, trace: Sequence[float] | np.ndarray
) -> RegretReport:
    opt = periodic_opt(f, rm)
    return regret_of_trace(opt.total, trace, opt.witness)


def generalized_periodic_regret(
    F: PartitionSet, rm: RewardMatrix, trace: Sequence[float] | np.ndarray
) -> RegretReport:
    opt = generalized_periodic_opt(F, rm)
    return regret_of_trace(opt.total, trace, opt.witness)


def regret_ceiling(num_arms: int, horizon: int, max_labels: int, num_functions: int) -> float:
    """10 * sqrt(PKT log K + KT log |F|); a loose sanity ceiling."""
    K, T = num_arms, horizon
    return 10.0 * math.sqrt(
        max_labels * K * T * math.log(K) + K * T * math.log(num_functions)
    )


def aggregate_reports(reports: Sequence[RegretReport]) -> RegretAggregate:
    regrets = np.array([report.regret for report in reports], dtype=float)
    if regrets.size == 0:
        return RegretAggregate(runs=0, mean=0.0, std=0.0)
    return RegretAggregate(
        runs=int(regrets.size), mean=float(regrets.mean()), std=float(regrets.std())
    )
