# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict
"""
Brute-force EXP4 over the expert class {theta o f : f in F, theta: f([T]) -> [K]}.

Exponential in P; only meant as a test oracle for Periodic EXP4.
"""

from __future__ import annotations

import itertools

import numpy as np
from loguru import logger
from scipy.special import logsumexp

from ...exceptions import PolicyError, ReferenceOracleInfeasible
from ..partitions import PartitionSet
from .base import ArmDistribution, Policy, PolicyConfig, SlotContext, normalize_scores

DEFAULT_EXPERT_CAP = 10**6


def count_experts(partitions: PartitionSet, num_arms: int) -> int:
    return sum(num_arms**f.num_labels for f in partitions)


class ReferenceExp4(Policy):
    name: str = "reference_exp4"

    def __init__(
        self,
        partitions: PartitionSet,
        config: PolicyConfig,
        expert_cap: int = DEFAULT_EXPERT_CAP,
    ) -> None:
        super().__init__(config.num_arms)
        num_experts = count_experts(partitions, config.num_arms)
        if num_experts > expert_cap:
            raise ReferenceOracleInfeasible(num_experts, expert_cap)
        if num_experts > expert_cap // 2:
            logger.warning(
                f"Reference EXP4 enumerates {num_experts} experts (cap {expert_cap})"
            )
        self.config: PolicyConfig = config
        self.partitions: PartitionSet = partitions

        # thetas[k][e, l]: the arm expert e of partition k plays on label l+1
        self.thetas: list[np.ndarray] = [
            np.array(
                list(itertools.product(range(config.num_arms), repeat=f.num_labels)),
                dtype=np.intp,
            ).reshape(-1, f.num_labels)
            for f in partitions
        ]
        self.logw: np.ndarray = np.zeros(num_experts)

    @property
    def num_experts(self) -> int:
        return int(self.logw.shape[0])

    def advice_at(self, t: int) -> np.ndarray:
        """Arm recommended by every expert at step t (1-based)."""
        return np.concatenate(
            [thetas[:, f.labels[t - 1] - 1] for f, thetas in zip(self.partitions, self.thetas)]
        )

    def _distribution(self, context: SlotContext | None) -> ArmDistribution:
        if self.t > self.partitions.horizon:
            raise PolicyError(f"{self.name}: step {self.t} beyond horizon {self.partitions.horizon}")
        advice = self.advice_at(self.t)
        scores = np.array(
            [
                logsumexp(self.logw[advice == arm]) if np.any(advice == arm) else -np.inf
                for arm in range(self.num_arms)
            ]
        )
        return ArmDistribution(
            probs=normalize_scores(scores, self.config.mixing), scores=scores
        )

    def _update(self, arm: int, reward: float, prob: float) -> None:
        gamma = self.config.gamma.at(self.t)
        self.logw[self.advice_at(self.t) == arm] += gamma / self.num_arms * reward / prob
