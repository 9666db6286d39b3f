# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict

from __future__ import annotations

import numpy as np

from ...exceptions import PolicyError
from ..partitions import canonicalize, make_partition_set
from .base import (
    ArmDistribution,
    Policy,
    PolicyConfig,
    SlotContext,
    uniform_distribution,
)
from .periodic_exp4 import PeriodicExp4


class Exp3(PeriodicExp4):
    """
    EXP3 as Periodic EXP4 over the single all-ones partition, so both share the
    same gamma schedule, mixing and numerics.
    """

    name: str = "exp3"

    def __init__(self, config: PolicyConfig, horizon: int) -> None:
        trivial = canonicalize(np.ones(horizon, dtype=np.int64), name="contiguous:1")
        super().__init__(make_partition_set([trivial]), config)


def optimal_random_distribution(
    bandwidths: np.ndarray, available: np.ndarray | None = None
) -> ArmDistribution:
    """
    Pick networks proportionally to their bandwidths over the available ones.
    """
    bandwidths = np.asarray(bandwidths, dtype=float)
    mask = (
        np.ones(bandwidths.shape[0], dtype=bool)
        if available is None
        else np.asarray(available, dtype=bool)
    )
    if not mask.any():
        raise PolicyError("optimal random needs at least one available network")
    weights = np.where(mask, np.clip(bandwidths, 0.0, None), 0.0)
    total = weights.sum()
    if total <= 0.0:
        raise PolicyError("optimal random needs an available network with positive bandwidth")
    return ArmDistribution(probs=weights / total)


class OptimalRandom(Policy):
    """Omniscient baseline; needs the slot's true bandwidths and availability."""

    name: str = "optimal_random"

    def _distribution(self, context: SlotContext | None) -> ArmDistribution:
        if context is None:
            raise PolicyError("optimal_random needs the slot context")
        available = np.asarray(context.available, dtype=bool)
        if available.any() and not np.any(np.where(available, context.bandwidths, 0.0) > 0.0):
            # every reachable network is down this slot
            return ArmDistribution(probs=available / available.sum(), fallback=True)
        return optimal_random_distribution(context.bandwidths, available)


class UniformRandom(Policy):
    name: str = "uniform"

    def _distribution(self, context: SlotContext | None) -> ArmDistribution:
        return uniform_distribution(self.num_arms)
