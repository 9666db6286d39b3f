# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict
"""
Periodic EXP4 with aggregate bookkeeping.

All weights live in the log domain:
    logb[f, l, i]  log b_i^{l,f}(t)
    logS[f, l]     log sum_j b_j^{l,f}(t)
    logB[f]        log prod_{l in f([T])} S_f^l(t)

The arm score for partition f at step t is b_i^{f(t),f} times the product of the
other labels' S. `corrected` takes that product over every label of f, which is
the weight mass EXP4 assigns when the experts of f are free on labels not seen
yet; `as_written` only multiplies labels already seen, i.e. it drops a factor of
K per unseen label.
"""

from __future__ import annotations

import io
import math

import numpy as np
from scipy.special import logsumexp

from ...exceptions import PolicyError
from ..partitions import PartitionSet
from .base import (
    ArmDistribution,
    NumericMode,
    Policy,
    PolicyConfig,
    SlotContext,
    Variant,
    normalize_scores,
)


class PeriodicExp4(Policy):
    name: str = "periodic_exp4"

    def __init__(self, partitions: PartitionSet, config: PolicyConfig) -> None:
        if len(partitions) == 0:
            raise PolicyError("Periodic EXP4 needs a non-empty period set")
        super().__init__(config.num_arms)
        self.config: PolicyConfig = config
        self.partitions: PartitionSet = partitions

        K = config.num_arms
        num_f = len(partitions)
        self._log_k: float = math.log(K)
        self._labels: np.ndarray = partitions.label_matrix
        self._seen: np.ndarray = partitions.seen_matrix
        self._num_labels: np.ndarray = partitions.num_labels
        self._f_index: np.ndarray = np.arange(num_f)

        self.logb: np.ndarray = np.zeros((num_f, partitions.max_labels, K))
        self.logS: np.ndarray = np.full((num_f, partitions.max_labels), self._log_k)
        self.logB: np.ndarray = self._num_labels * self._log_k

    @property
    def horizon(self) -> int:
        return self.partitions.horizon

    def _check_horizon(self) -> None:
        if self.t > self.horizon:
            raise PolicyError(
                f"{self.name}: step {self.t} beyond the period set horizon {self.horizon}"
            )

    def _log_terms(self) -> np.ndarray:
        """|F| x K matrix of per-partition log scores for the current step."""
        step = self.t - 1
        current = self._labels[:, step]
        others = self.logB - self.logS[self._f_index, current]
        if self.config.variant is Variant.AS_WRITTEN:
            others = others - (self._num_labels - self._seen[:, step]) * self._log_k
        return self.logb[self._f_index, current] + others[:, None]

    def log_scores(self, numeric_mode: NumericMode | None = None) -> np.ndarray:
        """log r_i(t) from the S/B aggregates."""
        self._check_horizon()
        terms = self._log_terms()
        mode = numeric_mode or self.config.numeric_mode
        if mode is NumericMode.MAX_APPROX:
            return terms.max(axis=0)
        return np.logaddexp.reduce(terms, axis=0)

    def naive_log_scores(self) -> np.ndarray:
        """
        log r_i(t) straight from the raw weights, multiplying per-label sums over
        f([t]) without the maintained aggregates. Used to cross-check them.
        """
        self._check_horizon()
        step = self.t - 1
        terms = np.empty((len(self.partitions), self.num_arms))
        for index, f in enumerate(self.partitions):
            current = int(self._labels[index, step])
            seen = int(self._seen[index, step])
            others = sum(
                float(logsumexp(self.logb[index, label]))
                for label in range(seen)
                if label != current
            )
            if self.config.variant is Variant.CORRECTED:
                others += (f.num_labels - seen) * self._log_k
            terms[index] = self.logb[index, current] + others
        if self.config.numeric_mode is NumericMode.MAX_APPROX:
            return terms.max(axis=0)
        return logsumexp(terms, axis=0)

    def _distribution(self, context: SlotContext | None) -> ArmDistribution:
        scores = self.log_scores()
        return ArmDistribution(
            probs=normalize_scores(scores, self.config.mixing), scores=scores
        )

    def _update(self, arm: int, reward: float, prob: float) -> None:
        self._check_horizon()
        gamma = self.config.gamma.at(self.t)
        estimate = gamma / self.num_arms * reward / prob
        if estimate == 0.0:
            return
        current = self._labels[:, self.t - 1]
        self.logb[self._f_index, current, arm] += estimate
        new_log_s = np.logaddexp.reduce(self.logb[self._f_index, current], axis=1)
        self.logB += new_log_s - self.logS[self._f_index, current]
        self.logS[self._f_index, current] = new_log_s

    def dump_state(self) -> str:
        """
        Text dump of the weight table, one row per entry with 1-based indices:
        `b f l i logb`, then `S f l logS` and `B f logB`.
        """
        out = io.StringIO()
        out.write(f"# {self.name} t={self.t} K={self.num_arms} |F|={len(self.partitions)}\n")
        for index, f in enumerate(self.partitions):
            for label in range(f.num_labels):
                for arm in range(self.num_arms):
                    out.write(
                        f"b {index + 1} {label + 1} {arm + 1} {self.logb[index, label, arm]:.17g}\n"
                    )
        for index, f in enumerate(self.partitions):
            for label in range(f.num_labels):
                out.write(f"S {index + 1} {label + 1} {self.logS[index, label]:.17g}\n")
        for index in range(len(self.partitions)):
            out.write(f"B {index + 1} {self.logB[index]:.17g}\n")
        return out.getvalue()
