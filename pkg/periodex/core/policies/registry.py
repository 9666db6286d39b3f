# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict

from __future__ import annotations

from enum import Enum

from ...exceptions import PolicyError
from ..partitions import PartitionSet
from .base import Policy, PolicyConfig
from .baselines import Exp3, OptimalRandom, UniformRandom
from .periodic_exp4 import PeriodicExp4
from .reference import ReferenceExp4


class PolicyName(str, Enum):
    PERIODIC_EXP4 = "periodic_exp4"
    EXP3 = "exp3"
    OPTIMAL_RANDOM = "optimal_random"
    UNIFORM = "uniform"
    REFERENCE_EXP4 = "reference_exp4"


def make_policy(
    name: PolicyName | str,
    *,
    num_arms: int,
    partitions: PartitionSet,
    config: PolicyConfig | None = None,
) -> Policy:
    """
    Build a fresh policy instance. Learners take `config` (its `num_arms` must
    match); the random baselines only need the arm count.
    """
    name = PolicyName(name)
    if name is PolicyName.OPTIMAL_RANDOM:
        return OptimalRandom(num_arms)
    if name is PolicyName.UNIFORM:
        return UniformRandom(num_arms)

    if config is None:
        config = PolicyConfig(num_arms=num_arms)
    elif config.num_arms != num_arms:
        raise PolicyError(f"policy config is for {config.num_arms} arms, not {num_arms}")
    if name is PolicyName.EXP3:
        return Exp3(config, horizon=partitions.horizon)
    if name is PolicyName.REFERENCE_EXP4:
        return ReferenceExp4(partitions, config)
    return PeriodicExp4(partitions, config)
