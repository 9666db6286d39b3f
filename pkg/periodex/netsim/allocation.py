# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict
"""
Equal-share resolution of a round and the max-min optimal allocation.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Sequence

import networkx as nx
import numpy as np

from ..exceptions import InfeasibleAvailabilityError

# slack for floor(bandwidth / rate) when rate is itself bandwidth / n
_CAPACITY_EPS = 1e-9

AvailabilityGroups = tuple[tuple[tuple[bool, ...], int], ...]


def simulate_round(
    bandwidths: np.ndarray, choices: np.ndarray, available: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """
    Resolve one slot. `choices` holds each device's network, `available` is the
    N x K availability matrix. Devices on an unavailable network get 0 and do
    not count as clients. Returns (gains, client counts per network).
    """
    devices = np.arange(choices.shape[0])
    connected = available[devices, choices]
    counts = np.bincount(choices[connected], minlength=bandwidths.shape[0])
    gains = np.zeros(choices.shape[0])
    gains[connected] = bandwidths[choices[connected]] / counts[choices[connected]]
    return gains, counts


def counterfactual_gains(
    bandwidths: np.ndarray, choices: np.ndarray, available: np.ndarray, counts: np.ndarray
) -> np.ndarray:
    """
    N x K table of what each network would have paid each device, given the
    other devices' choices. Unavailable networks pay 0.
    """
    devices = np.arange(choices.shape[0])
    others = np.broadcast_to(counts, available.shape).copy()
    connected = available[devices, choices]
    others[devices[connected], choices[connected]] -= 1
    return np.where(available, bandwidths / (others + 1), 0.0)


def availability_groups(available: np.ndarray) -> AvailabilityGroups:
    """Devices with identical masks, as a sorted hashable key."""
    masks, counts = np.unique(np.asarray(available, dtype=bool), axis=0, return_counts=True)
    return tuple(
        (tuple(bool(x) for x in mask), int(count)) for mask, count in zip(masks, counts)
    )


def _feasible(bandwidths: tuple[float, ...], groups: AvailabilityGroups, rate: float) -> bool:
    caps = [math.floor(b / rate + _CAPACITY_EPS) for b in bandwidths]
    demand = sum(count for _, count in groups)
    if len(groups) == 1:
        mask = groups[0][0]
        return sum(cap for cap, ok in zip(caps, mask) if ok) >= demand

    graph = nx.DiGraph()
    for g, (mask, count) in enumerate(groups):
        graph.add_edge("source", ("group", g), capacity=count)
        for j, ok in enumerate(mask):
            if ok and caps[j] > 0:
                graph.add_edge(("group", g), ("network", j), capacity=count)
    for j, cap in enumerate(caps):
        if cap > 0:
            graph.add_edge(("network", j), "sink", capacity=min(cap, demand))
    if "sink" not in graph:
        return False
    return nx.maximum_flow_value(graph, "source", "sink") >= demand


@lru_cache(maxsize=8192)
def _optimal_min_rate_cached(
    bandwidths: tuple[float, ...], groups: AvailabilityGroups
) -> float:
    demand = sum(count for _, count in groups)
    candidates = sorted(
        {b / n for b in bandwidths if b > 0.0 for n in range(1, demand + 1)}
    )
    lo, hi = 0, len(candidates) - 1
    best = 0.0
    while lo <= hi:
        mid = (lo + hi) // 2
        if _feasible(bandwidths, groups, candidates[mid]):
            best = candidates[mid]
            lo = mid + 1
        else:
            hi = mid - 1
    return best


def optimal_min_rate(bandwidths: Sequence[float] | np.ndarray, available: np.ndarray) -> float:
    """
    Max-min per-device rate under equal sharing. The optimum is some
    bandwidth_j / n; we binary-search those candidates with a bipartite
    feasibility test between availability groups and networks.
    """
    available = np.asarray(available, dtype=bool)
    if available.ndim != 2 or available.shape[0] == 0:
        raise InfeasibleAvailabilityError("need an N x K availability matrix with N >= 1")
    if not available.any(axis=1).all():
        raise InfeasibleAvailabilityError("a device has no available network")
    return optimal_min_rate_for_groups(bandwidths, availability_groups(available))


def optimal_min_rate_for_groups(
    bandwidths: Sequence[float] | np.ndarray, groups: AvailabilityGroups
) -> float:
    """`optimal_min_rate` with the availability groups precomputed."""
    return _optimal_min_rate_cached(tuple(float(b) for b in bandwidths), groups)


def brute_force_min_rate(bandwidths: Sequence[float] | np.ndarray, available: np.ndarray) -> float:
    """Exhaustive search over assignments; tiny instances only."""
    bandwidths = np.asarray(bandwidths, dtype=float)
    available = np.asarray(available, dtype=bool)
    options = [np.flatnonzero(row).tolist() for row in available]
    if any(not opts for opts in options):
        raise InfeasibleAvailabilityError("a device has no available network")
    best = 0.0
    for assignment in itertools.product(*options):
        counts = np.bincount(np.asarray(assignment), minlength=bandwidths.shape[0])
        best = max(best, min(bandwidths[j] / counts[j] for j in assignment))
    return float(best)


def distance_pct(min_rate: float, optimal: float) -> float:
    if optimal <= 0.0:
        return 0.0
    return 100.0 * (optimal - min_rate) / optimal


def clear_cache() -> None:
    _optimal_min_rate_cached.cache_clear()


def cache_info() -> str:
    return str(_optimal_min_rate_cached.cache_info())
