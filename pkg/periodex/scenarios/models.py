# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict

from __future__ import annotations

from enum import Enum
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self

from ..core.partitions import (
    PartitionSet,
    PartitionStyle,
    make_partition_set,
    make_period_list_set,
    tile_partition,
)
from ..core.policies import GammaSchedule, NumericMode, PolicyConfig, PolicyName, Variant
from ..netsim.bandwidth import points_curve, segments_curve

DEFAULT_MAX_PERIOD = 24


class DeviceVariant(str, Enum):
    # picks from every network; inaccessible picks earn 0
    VANILLA = "vanilla"
    # restricts its distribution to the accessible networks before sampling
    AVAILABILITY_AWARE = "availability_aware"


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Segment(_StrictModel):
    end_slot: int = Field(..., ge=1, description="Last slot (inclusive) of this segment")
    mbps: float = Field(..., ge=0.0)


class Point(_StrictModel):
    slot: int = Field(..., ge=1)
    mbps: float = Field(..., ge=0.0)


class SegmentsCurve(_StrictModel):
    kind: Literal["segments"] = "segments"
    segments: list[Segment] = Field(..., min_length=1)

    # pyre-fixme[56]: Invalid decoration [56]
    @model_validator(mode="after")
    def _check_increasing(self) -> Self:
        ends = [segment.end_slot for segment in self.segments]
        if any(b <= a for a, b in zip(ends, ends[1:])):
            raise ValueError("segment end slots must be strictly increasing")
        return self

    def last_slot(self) -> int:
        return self.segments[-1].end_slot

    def to_array(self, iteration_length: int) -> np.ndarray:
        return segments_curve(
            [(segment.end_slot, segment.mbps) for segment in self.segments], iteration_length
        )


class PointsCurve(_StrictModel):
    kind: Literal["points"] = "points"
    points: list[Point] = Field(..., min_length=1)

    # pyre-fixme[56]: Invalid decoration [56]
    @model_validator(mode="after")
    def _check_increasing(self) -> Self:
        slots = [point.slot for point in self.points]
        if any(b <= a for a, b in zip(slots, slots[1:])):
            raise ValueError("anchor slots must be strictly increasing")
        return self

    def last_slot(self) -> int:
        return self.points[-1].slot

    def to_array(self, iteration_length: int) -> np.ndarray:
        return points_curve(
            [(point.slot, point.mbps) for point in self.points], iteration_length
        )


class ValuesCurve(_StrictModel):
    kind: Literal["values"] = "values"
    values: list[Annotated[float, Field(ge=0.0)]] = Field(..., min_length=1)

    def last_slot(self) -> int:
        return len(self.values)

    def to_array(self, iteration_length: int) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


Curve = Annotated[Union[SegmentsCurve, PointsCurve, ValuesCurve], Field(discriminator="kind")]


class NetworkConfig(_StrictModel):
    id: str = Field(..., min_length=1)
    curve: Curve
    noise_pct: float = Field(
        default=0.0, ge=0.0, description="Relative Gaussian noise, e.g. 0.1 for 10%"
    )


class DeviceGroupConfig(_StrictModel):
    name: str = Field(..., min_length=1)
    count: int = Field(default=1, ge=1)
    policy: PolicyName | None = Field(
        default=None, description="Overrides the scenario policy for this group"
    )
    variant: DeviceVariant | None = Field(
        default=None, description="Overrides the scenario device_variant for this group"
    )
    availability: list[list[str]] | None = Field(
        default=None,
        description="Accessible network ids per phase; every network in every phase when unset",
    )


class PeriodSetConfig(_StrictModel):
    style: PartitionStyle = PartitionStyle.CONTIGUOUS
    max_period: int | None = Field(default=None, ge=1, description="Periods 1..max_period")
    periods: list[Annotated[int, Field(ge=1)]] | None = Field(
        default=None, description="Explicit period list such as [4]"
    )
    sequences: list[list[Annotated[int, Field(ge=1)]]] | None = Field(
        default=None,
        description="Explicit per-iteration label sequences, repeated every iteration",
    )

    # pyre-fixme[56]: Invalid decoration [56]
    @model_validator(mode="after")
    def _exactly_one_source(self) -> Self:
        given = [
            name
            for name in ("max_period", "periods", "sequences")
            if getattr(self, name) is not None
        ]
        if len(given) != 1:
            raise ValueError(
                "exactly one of max_period, periods or sequences must be set"
                + (f" (got {', '.join(given)})" if given else "")
            )
        if self.periods is not None and not self.periods:
            raise ValueError("periods must not be empty")
        if self.sequences is not None and not self.sequences:
            raise ValueError("sequences must not be empty")
        return self

    def period_list(self) -> list[int]:
        if self.max_period is not None:
            return list(range(1, self.max_period + 1))
        return list(self.periods or [])

    def largest_period(self) -> int:
        if self.sequences is not None:
            return max(max(sequence) for sequence in self.sequences)
        return max(self.period_list())

    def build(self, iteration_length: int, horizon: int) -> PartitionSet:
        if self.sequences is not None:
            return make_partition_set(
                tile_partition(sequence, horizon, name=f"explicit:{index + 1}")
                for index, sequence in enumerate(self.sequences)
            )
        return make_period_list_set(self.period_list(), iteration_length, horizon, self.style)

    def label(self) -> str:
        if self.sequences is not None:
            return f"explicit[{len(self.sequences)}]"
        periods = self.period_list()
        if self.max_period is not None and self.max_period > 1:
            return f"{{1..{self.max_period}}}"
        return "{" + ",".join(str(p) for p in periods) + "}"


class PolicySettings(_StrictModel):
    name: PolicyName = PolicyName.PERIODIC_EXP4
    variant: Variant = Variant.AS_WRITTEN
    numeric_mode: NumericMode = NumericMode.EXACT
    gamma: GammaSchedule = Field(default_factory=GammaSchedule)
    mixing: float = Field(default=0.0, ge=0.0, lt=1.0)

    def to_config(self, num_arms: int) -> PolicyConfig:
        return PolicyConfig(
            num_arms=num_arms,
            gamma=self.gamma,
            variant=self.variant,
            numeric_mode=self.numeric_mode,
            mixing=self.mixing,
        )


class DeviceSpec(BaseModel):
    """One resolved device of a scenario."""

    id: str
    group: str
    policy: PolicyName
    variant: DeviceVariant
    # network ids per phase
    availability: list[list[str]]


class ScenarioConfig(_StrictModel):
    version: Literal[1] = Field(1, description="Scenario format version")
    name: str = Field(..., min_length=1)
    description: str = ""
    iteration_length: int = Field(default=1440, ge=1, description="Slots per iteration")
    iterations: int = Field(default=60, ge=1)
    networks: list[NetworkConfig] = Field(..., min_length=1)
    device_groups: list[DeviceGroupConfig] = Field(..., min_length=1)
    phases: list[int] | None = Field(
        default=None,
        description="End slot of every availability phase; the last one is the iteration length",
    )
    period_set: PeriodSetConfig = Field(
        default_factory=lambda: PeriodSetConfig(max_period=DEFAULT_MAX_PERIOD)
    )
    policy: PolicySettings = Field(default_factory=PolicySettings)
    reward_scale: float | None = Field(
        default=None,
        gt=0.0,
        description="Mbps mapped to reward 1; defaults to the largest noiseless bandwidth",
    )
    device_variant: DeviceVariant = DeviceVariant.AVAILABILITY_AWARE
    runs: int = Field(default=20, ge=1)
    seed: int = Field(default=0, ge=0, description="Master seed")

    # pyre-fixme[56]: Invalid decoration [56]
    @model_validator(mode="after")
    def _check_consistency(self) -> Self:
        L = self.iteration_length
        ids = [network.id for network in self.networks]
        if len(set(ids)) != len(ids):
            raise ValueError(f"network ids must be unique, got {ids}")
        names = [group.name for group in self.device_groups]
        if len(set(names)) != len(names):
            raise ValueError(f"device group names must be unique, got {names}")

        for network in self.networks:
            curve = network.curve
            if isinstance(curve, SegmentsCurve) and curve.last_slot() != L:
                raise ValueError(
                    f"network {network.id}: segments must end at slot {L}, not {curve.last_slot()}"
                )
            if isinstance(curve, PointsCurve) and curve.last_slot() > L:
                raise ValueError(f"network {network.id}: anchor slot beyond {L}")
            if isinstance(curve, ValuesCurve) and curve.last_slot() != L:
                raise ValueError(
                    f"network {network.id}: {curve.last_slot()} values for {L} slots"
                )

        ends = self.phase_ends()
        if any(b <= a for a, b in zip(ends, ends[1:])) or ends[0] < 1 or ends[-1] != L:
            raise ValueError(f"phases must be increasing end slots finishing at {L}, got {ends}")

        known = set(ids)
        for group in self.device_groups:
            if group.availability is None:
                continue
            if len(group.availability) != len(ends):
                raise ValueError(
                    f"device group {group.name}: {len(group.availability)} availability "
                    f"entries for {len(ends)} phases"
                )
            variant = group.variant or self.device_variant
            for phase, networks in enumerate(group.availability):
                unknown = sorted(set(networks) - known)
                if unknown:
                    raise ValueError(
                        f"device group {group.name}: unknown networks {unknown} in phase {phase + 1}"
                    )
                if not networks and variant is not DeviceVariant.VANILLA:
                    raise ValueError(
                        f"device group {group.name}: phase {phase + 1} grants no network, "
                        "which only the vanilla variant allows"
                    )

        limit = L if self.period_set.style is PartitionStyle.CONTIGUOUS else self.horizon
        if self.period_set.sequences is not None:
            for sequence in self.period_set.sequences:
                if len(sequence) != L:
                    raise ValueError(
                        f"explicit label sequences must have {L} entries, got {len(sequence)}"
                    )
        elif self.period_set.largest_period() > limit:
            raise ValueError(
                f"maximum period {self.period_set.largest_period()} exceeds {limit}"
            )
        return self

    @property
    def horizon(self) -> int:
        return self.iteration_length * self.iterations

    @property
    def num_networks(self) -> int:
        return len(self.networks)

    @property
    def num_devices(self) -> int:
        return sum(group.count for group in self.device_groups)

    def network_ids(self) -> list[str]:
        return [network.id for network in self.networks]

    def phase_ends(self) -> list[int]:
        return list(self.phases) if self.phases else [self.iteration_length]

    def devices(self) -> list[DeviceSpec]:
        all_networks = self.network_ids()
        phases = len(self.phase_ends())
        specs = []
        for group in self.device_groups:
            for k in range(1, group.count + 1):
                specs.append(
                    DeviceSpec(
                        id=group.name if group.count == 1 else f"{group.name}_{k}",
                        group=group.name,
                        policy=group.policy or self.policy.name,
                        variant=group.variant or self.device_variant,
                        availability=group.availability or [all_networks] * phases,
                    )
                )
        return specs

    def curve_table(self) -> np.ndarray:
        """K x L noiseless bandwidths."""
        return np.stack(
            [network.curve.to_array(self.iteration_length) for network in self.networks]
        )

    def effective_reward_scale(self) -> float:
        if self.reward_scale is not None:
            return self.reward_scale
        peak = float(self.curve_table().max())
        return peak if peak > 0.0 else 1.0

    def partition_set(self) -> PartitionSet:
        return self.period_set.build(self.iteration_length, self.horizon)
