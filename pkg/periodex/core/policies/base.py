# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Literal

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field, model_validator

from ...exceptions import MissingDistributionError, PolicyError, RewardRangeError

SIMPLEX_TOLERANCE = 1e-12


class Variant(str, Enum):
    AS_WRITTEN = "as_written"
    CORRECTED = "corrected"


class NumericMode(str, Enum):
    EXACT = "exact_logsumexp"
    MAX_APPROX = "max_approx"


class GammaSchedule(BaseModel):
    kind: Literal["power", "fixed"] = Field(
        default="power",
        description="`power`: gamma(t) = t^(-exponent); `fixed`: gamma(t) = value",
    )
    exponent: float = Field(default=0.1, ge=0.0, description="Power-law exponent")
    value: float | None = Field(
        default=None, gt=0.0, le=1.0, description="Constant gamma for the fixed schedule"
    )

    @model_validator(mode="after")
    def _check_fixed_value(self) -> "GammaSchedule":
        if self.kind == "fixed" and self.value is None:
            raise ValueError("a fixed gamma schedule needs `value`")
        return self

    def at(self, t: int) -> float:
        if self.kind == "fixed":
            assert self.value is not None
            return self.value
        return float(t) ** (-self.exponent)


class PolicyConfig(BaseModel):
    num_arms: int = Field(..., ge=2, description="Number of arms K")
    gamma: GammaSchedule = Field(default_factory=GammaSchedule)
    variant: Variant = Field(
        default=Variant.AS_WRITTEN,
        description="as_written follows the published score; corrected adds the unseen-label factor",
    )
    numeric_mode: NumericMode = Field(default=NumericMode.EXACT)
    mixing: float = Field(
        default=0.0, ge=0.0, lt=1.0, description="Uniform exploration weight"
    )


@dataclass(frozen=True, eq=False)
class ArmDistribution:
    probs: np.ndarray
    # log r_i; None for policies that do not keep scores
    scores: np.ndarray | None = None
    fallback: bool = False

    @property
    def num_arms(self) -> int:
        return int(self.probs.shape[0])


@dataclass(frozen=True, eq=False)
class SlotContext:
    """What the environment reveals to omniscient baselines for one slot."""

    bandwidths: np.ndarray
    available: np.ndarray


def normalize_scores(scores: np.ndarray, mixing: float = 0.0) -> np.ndarray:
    probs = np.exp(scores - scores.max())
    probs /= probs.sum()
    if mixing > 0.0:
        probs = (1.0 - mixing) * probs + mixing / probs.shape[0]
    return probs


def uniform_distribution(num_arms: int) -> ArmDistribution:
    return ArmDistribution(probs=np.full(num_arms, 1.0 / num_arms))


def restrict_to_available(dist: ArmDistribution, mask: np.ndarray) -> ArmDistribution:
    """
    Zero out unavailable arms and renormalize. If no probability mass is left on
    available arms we fall back to uniform over them and flag the result.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != dist.probs.shape:
        raise PolicyError(
            f"availability mask has {mask.shape[0]} entries for {dist.num_arms} arms"
        )
    if not mask.any():
        raise PolicyError("no arm is available")
    if mask.all():
        return dist

    restricted = np.where(mask, dist.probs, 0.0)
    mass = restricted.sum()
    if mass <= 0.0:
        logger.debug("No probability mass on available arms, falling back to uniform")
        return ArmDistribution(
            probs=mask / mask.sum(), scores=dist.scores, fallback=True
        )
    return ArmDistribution(probs=restricted / mass, scores=dist.scores)


def sample_arm(dist: ArmDistribution, rng: np.random.Generator) -> int:
    """
    Inverse-CDF sampling in arm-index order; returns a zero-based arm.
    """
    cumulative = np.cumsum(dist.probs)
    arm = int(np.searchsorted(cumulative, rng.random(), side="right"))
    if arm >= dist.num_arms:
        # u landed above a cumulative total that rounded below 1
        arm = int(np.flatnonzero(dist.probs > 0.0)[-1])
    return arm


class Policy(ABC):
    """
    A learner over `num_arms` arms. Each step is `distribution()` followed by
    `update()` with the observed reward of the arm that was played.
    """

    name: str = "policy"

    def __init__(self, num_arms: int) -> None:
        self.num_arms: int = num_arms
        self.t: int = 1
        self._pending: np.ndarray | None = None

    @abstractmethod
    def _distribution(self, context: SlotContext | None) -> ArmDistribution: ...

    def _update(self, arm: int, reward: float, prob: float) -> None:
        """Learners override this; baselines ignore feedback."""

    def distribution(self, context: SlotContext | None = None) -> ArmDistribution:
        dist = self._distribution(context)
        self._pending = dist.probs
        return dist

    def update(self, arm: int, reward: float, prob: float | None = None) -> None:
        """
        `prob` is the probability the arm was actually sampled with; it defaults
        to the policy's own pending distribution.
        """
        if self._pending is None:
            raise MissingDistributionError(
                f"{self.name}: update at t={self.t} without a preceding distribution"
            )
        if not 0.0 <= reward <= 1.0:
            raise RewardRangeError(f"reward {reward} outside [0, 1]")
        if not 0 <= arm < self.num_arms:
            raise PolicyError(f"arm {arm} outside [0, {self.num_arms})")
        p = float(self._pending[arm]) if prob is None else float(prob)
        if p <= 0.0:
            raise PolicyError(f"arm {arm} was played with probability {p}")
        self._update(arm, reward, p)
        self._pending = None
        self.t += 1
