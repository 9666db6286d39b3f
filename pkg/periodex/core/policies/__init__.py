# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict

from .base import (
    ArmDistribution,
    GammaSchedule,
    NumericMode,
    Policy,
    PolicyConfig,
    SlotContext,
    Variant,
    restrict_to_available,
    sample_arm,
    uniform_distribution,
)
from .baselines import Exp3, OptimalRandom, UniformRandom, optimal_random_distribution
from .periodic_exp4 import PeriodicExp4
from .reference import DEFAULT_EXPERT_CAP, ReferenceExp4, count_experts
from .registry import PolicyName, make_policy

__all__ = [
    "ArmDistribution",
    "DEFAULT_EXPERT_CAP",
    "Exp3",
    "GammaSchedule",
    "NumericMode",
    "OptimalRandom",
    "PeriodicExp4",
    "Policy",
    "PolicyConfig",
    "PolicyName",
    "ReferenceExp4",
    "SlotContext",
    "UniformRandom",
    "Variant",
    "count_experts",
    "make_policy",
    "optimal_random_distribution",
    "restrict_to_available",
    "sample_arm",
    "uniform_distribution",
]
