# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class NetworkProfile:
    id: str
    # noiseless Mbps for slots 1..iteration_length
    curve: np.ndarray
    noise_pct: float = 0.0

    @property
    def iteration_length(self) -> int:
        return int(self.curve.shape[0])


def segments_curve(segments: Sequence[tuple[int, float]], iteration_length: int) -> np.ndarray:
    """
    Piecewise-constant curve from (end_slot, mbps) pairs; segment k covers the
    slots after the previous end up to and including its own end.
    """
    curve = np.empty(iteration_length)
    start = 0
    for end_slot, mbps in segments:
        curve[start:end_slot] = mbps
        start = end_slot
    return curve


def points_curve(points: Sequence[tuple[int, float]], iteration_length: int) -> np.ndarray:
    """Linear interpolation between (slot, mbps) anchors, wrapping around the iteration."""
    slots = np.array([slot for slot, _ in points], dtype=float)
    values = np.array([mbps for _, mbps in points], dtype=float)
    return np.interp(
        np.arange(1, iteration_length + 1), slots, values, period=iteration_length
    )


def bandwidth_at(profile: NetworkProfile, slot: int, rng: np.random.Generator) -> float:
    """
    Curve value for `slot` (1-based, repeating every iteration), scaled by
    max(0, 1 + noise_pct * z) with z drawn from `rng` when noise is enabled.
    """
    value = float(profile.curve[(slot - 1) % profile.iteration_length])
    if profile.noise_pct == 0.0:
        return value
    return value * max(0.0, 1.0 + profile.noise_pct * float(rng.standard_normal()))


def bandwidths_at(
    curves: np.ndarray, noise_pct: np.ndarray, slot: int, rng: np.random.Generator
) -> np.ndarray:
    """
    Vectorized `bandwidth_at` for all networks of a slot (curves is K x L). One
    normal draw per network, in network order, only when some network is noisy.
    """
    values = curves[:, (slot - 1) % curves.shape[1]]
    if not noise_pct.any():
        return values.copy()
    draws = rng.standard_normal(values.shape[0])
    return values * np.maximum(0.0, 1.0 + noise_pct * draws)
