# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict
"""
Partition functions f: [T] -> [P_f] over a fixed horizon, and period sets F.

Partitions are materialized as explicit, canonically relabeled label sequences:
labels are numbered 1..P_f in order of first use, so two partitions that are
permutations of each other have identical label arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from ..exceptions import PartitionError


class PartitionStyle(str, Enum):
    MODULAR = "modular"
    CONTIGUOUS = "contiguous"


@dataclass(frozen=True, eq=False)
class PartitionFunction:
    labels: np.ndarray
    name: str = ""

    @property
    def horizon(self) -> int:
        return int(self.labels.shape[0])

    @cached_property
    def num_labels(self) -> int:
        return int(self.labels.max())

    @cached_property
    def seen_counts(self) -> np.ndarray:
        """|f([t])| for t = 1..T. With first-use labels this is the running maximum."""
        counts = np.maximum.accumulate(self.labels)
        counts.setflags(write=False)
        return counts

    def label_at(self, t: int) -> int:
        _check_step(t, self.horizon)
        return int(self.labels[t - 1])

    def __len__(self) -> int:
        return self.horizon

    def __repr__(self) -> str:
        return f"PartitionFunction(name={self.name!r}, T={self.horizon}, P_f={self.num_labels})"


def _check_step(t: int, horizon: int) -> None:
    if not 1 <= t <= horizon:
        raise PartitionError(f"time step {t} outside [1, {horizon}]")


def canonicalize(labels: Sequence[int] | np.ndarray, name: str = "") -> PartitionFunction:
    """
    Relabel an arbitrary positive label sequence in first-use order.
    """
    raw = np.asarray(labels)
    if raw.ndim != 1 or raw.shape[0] == 0:
        raise PartitionError("a partition needs a non-empty one-dimensional label sequence")
    if not np.issubdtype(raw.dtype, np.integer):
        if not np.all(np.equal(np.mod(raw, 1), 0)):
            raise PartitionError("partition labels must be integers")
        raw = raw.astype(np.int64)
    if raw.min() < 1:
        raise PartitionError("partition labels must be positive")

    _, first_index, inverse = np.unique(raw, return_index=True, return_inverse=True)
    rank = np.empty_like(first_index)
    rank[np.argsort(first_index, kind="stable")] = np.arange(first_index.shape[0])
    canonical = (rank[inverse.reshape(-1)] + 1).astype(np.int32)
    canonical.setflags(write=False)
    return PartitionFunction(labels=canonical, name=name)


def make_modular_partition(tau: int, T: int) -> PartitionFunction:
    if tau < 1:
        raise PartitionError(f"period must be at least 1, got {tau}")
    if tau > T:
        raise PartitionError(f"label never used: period {tau} exceeds horizon {T}")
    steps = np.arange(1, T + 1)
    return canonicalize(steps % tau + 1, name=f"modular:{tau}")


def make_contiguous_periodic_partition(
    tau: int, iteration_length: int, T: int
) -> PartitionFunction:
    """
    Split each iteration into `tau` contiguous segments labeled in chronological
    order; slot s of an iteration gets ceil(s * tau / iteration_length). Segment
    sizes differ by at most one when tau does not divide the iteration.
    """
    if tau < 1:
        raise PartitionError(f"period must be at least 1, got {tau}")
    if tau > iteration_length:
        raise PartitionError(
            f"period {tau} exceeds the iteration length {iteration_length}"
        )
    if T < iteration_length or T % iteration_length != 0:
        raise PartitionError(
            f"horizon {T} is not a positive multiple of the iteration length {iteration_length}"
        )
    slots = np.arange(1, iteration_length + 1)
    one_iteration = (slots * tau + iteration_length - 1) // iteration_length
    return canonicalize(np.tile(one_iteration, T // iteration_length), name=f"contiguous:{tau}")


def tile_partition(
    labels: Sequence[int], T: int, name: str = "explicit"
) -> PartitionFunction:
    """Repeat an explicit per-iteration label sequence over the horizon."""
    length = len(labels)
    if length == 0 or T % length != 0:
        raise PartitionError(
            f"horizon {T} is not a multiple of the explicit sequence length {length}"
        )
    return canonicalize(np.tile(np.asarray(labels), T // length), name=name)


def canonical_equal(f: PartitionFunction, g: PartitionFunction) -> bool:
    if f.horizon != g.horizon:
        raise PartitionError(f"horizon mismatch: {f.horizon} != {g.horizon}")
    return bool(np.array_equal(f.labels, g.labels))


def labels_seen(f: PartitionFunction, t: int) -> frozenset[int]:
    """f([t]) = {f(1), ..., f(t)}."""
    _check_step(t, f.horizon)
    return frozenset(range(1, int(f.seen_counts[t - 1]) + 1))


@dataclass(frozen=True, eq=False)
class PartitionSet:
    functions: tuple[PartitionFunction, ...]

    @property
    def horizon(self) -> int:
        return self.functions[0].horizon

    @cached_property
    def max_labels(self) -> int:
        return max(f.num_labels for f in self.functions)

    @cached_property
    def num_labels(self) -> np.ndarray:
        return np.array([f.num_labels for f in self.functions], dtype=np.int64)

    @cached_property
    def label_matrix(self) -> np.ndarray:
        """|F| x T matrix of zero-based labels."""
        matrix = np.stack([f.labels for f in self.functions]).astype(np.intp) - 1
        matrix.setflags(write=False)
        return matrix

    @cached_property
    def seen_matrix(self) -> np.ndarray:
        """|F| x T matrix of |f([t])|."""
        matrix = np.stack([f.seen_counts for f in self.functions]).astype(np.int64)
        matrix.setflags(write=False)
        return matrix

    def names(self) -> list[str]:
        return [f.name for f in self.functions]

    def __len__(self) -> int:
        return len(self.functions)

    def __iter__(self) -> Iterator[PartitionFunction]:
        return iter(self.functions)

    def __getitem__(self, index: int) -> PartitionFunction:
        return self.functions[index]


def make_partition_set(functions: Iterable[PartitionFunction]) -> PartitionSet:
    """
    Build a period set, dropping canonical duplicates (the first occurrence wins).
    """
    kept: list[PartitionFunction] = []
    seen: set[bytes] = set()
    horizon: int | None = None
    for f in functions:
        if horizon is None:
            horizon = f.horizon
        elif f.horizon != horizon:
            raise PartitionError(f"horizon mismatch: {f.horizon} != {horizon}")
        key = f.labels.tobytes()
        if key in seen:
            continue
        seen.add(key)
        kept.append(f)
    if not kept:
        raise PartitionError("a period set needs at least one partition function")
    return PartitionSet(functions=tuple(kept))


def make_period_list_set(
    periods: Iterable[int],
    iteration_length: int,
    T: int,
    style: PartitionStyle | str = PartitionStyle.CONTIGUOUS,
) -> PartitionSet:
    style = PartitionStyle(style)
    if style is PartitionStyle.CONTIGUOUS:
        return make_partition_set(
            make_contiguous_periodic_partition(tau, iteration_length, T) for tau in periods
        )
    return make_partition_set(make_modular_partition(tau, T) for tau in periods)


def make_period_range_set(
    P: int,
    iteration_length: int,
    T: int,
    style: PartitionStyle | str = PartitionStyle.CONTIGUOUS,
) -> PartitionSet:
    if P < 1:
        raise PartitionError(f"maximum period must be at least 1, got {P}")
    return make_period_list_set(range(1, P + 1), iteration_length, T, style)
