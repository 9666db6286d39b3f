# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict
"""
Lock-step simulation of devices picking wireless networks.

Every slot each device asks its policy for a distribution, optionally restricts
it to the networks it can reach, samples, and only then does the environment
share each network's bandwidth equally among its clients. Policies are updated
with the gain divided by the scenario's reward scale.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from loguru import logger
from pydantic import ValidationError

from ..core.partitions import PartitionSet
from ..core.policies import (
    ArmDistribution,
    Policy,
    PolicyConfig,
    PolicyName,
    SlotContext,
    make_policy,
    restrict_to_available,
    sample_arm,
)
from ..core.regret import RegretReport, RewardMatrix, generalized_periodic_regret
from ..exceptions import PeriodexError, ScenarioConfigError, SimulationError
from ..scenarios.models import DeviceSpec, DeviceVariant, ScenarioConfig
from ..utils.timeutil import get_human_delta
from .allocation import (
    AvailabilityGroups,
    availability_groups,
    cache_info,
    counterfactual_gains,
    distance_pct,
    optimal_min_rate_for_groups,
    simulate_round,
)
from .bandwidth import bandwidths_at
from .records import StepRecord

# one slot is one minute of download
GB_PER_MBPS_SLOT: float = 60.0 / 8.0 / 1000.0

_LEARNERS = {PolicyName.PERIODIC_EXP4, PolicyName.EXP3, PolicyName.REFERENCE_EXP4}


@dataclass(frozen=True, eq=False)
class ScenarioPlan:
    """A scenario flattened into the arrays the slot loop reads."""

    name: str
    network_ids: list[str]
    devices: list[DeviceSpec]
    iteration_length: int
    iterations: int
    # K x L noiseless Mbps
    curves: np.ndarray
    noise_pct: np.ndarray
    # zero-based phase of every slot of an iteration
    phase_of_slot: np.ndarray
    # phases x N x K
    masks: np.ndarray
    # devices that restrict to their available networks
    aware: np.ndarray
    # per phase, availability groups of the devices that can reach some network
    groups: list[AvailabilityGroups]
    partitions: PartitionSet
    policy_config: PolicyConfig | None
    reward_scale: float

    @property
    def horizon(self) -> int:
        return self.iteration_length * self.iterations

    @property
    def num_devices(self) -> int:
        return len(self.devices)

    @property
    def num_networks(self) -> int:
        return len(self.network_ids)

    def device_ids(self) -> list[str]:
        return [device.id for device in self.devices]


def compile_scenario(scenario: ScenarioConfig) -> ScenarioPlan:
    """Resolve everything a run needs so config problems surface before slot 1."""
    network_ids = scenario.network_ids()
    index = {network_id: j for j, network_id in enumerate(network_ids)}
    devices = scenario.devices()
    ends = scenario.phase_ends()
    K, N = len(network_ids), len(devices)

    masks = np.zeros((len(ends), N, K), dtype=bool)
    for d, device in enumerate(devices):
        for phase, reachable in enumerate(device.availability):
            masks[phase, d, [index[network_id] for network_id in reachable]] = True
    slots = np.arange(1, scenario.iteration_length + 1)
    phase_of_slot = np.searchsorted(np.asarray(ends), slots, side="left")

    groups = []
    for phase_mask in masks:
        active = phase_mask.any(axis=1)
        groups.append(availability_groups(phase_mask[active]) if active.any() else ())

    policy_config = None
    if any(device.policy in _LEARNERS for device in devices):
        if K < 2:
            raise ScenarioConfigError(
                f"scenario {scenario.name}: learning policies need at least 2 networks",
                ["networks: at least 2 networks required"],
            )
        try:
            policy_config = scenario.policy.to_config(K)
        except ValidationError as e:
            raise ScenarioConfigError(f"scenario {scenario.name}: {e}") from None

    return ScenarioPlan(
        name=scenario.name,
        network_ids=network_ids,
        devices=devices,
        iteration_length=scenario.iteration_length,
        iterations=scenario.iterations,
        curves=scenario.curve_table(),
        noise_pct=np.array([network.noise_pct for network in scenario.networks]),
        phase_of_slot=phase_of_slot,
        masks=masks,
        aware=np.array(
            [device.variant is DeviceVariant.AVAILABILITY_AWARE for device in devices]
        ),
        groups=groups,
        partitions=scenario.partition_set(),
        policy_config=policy_config,
        reward_scale=scenario.effective_reward_scale(),
    )


def combined_probabilities(device_probs: np.ndarray) -> np.ndarray:
    """Mean over devices (axis -2) of their per-network distributions."""
    return np.asarray(device_probs, dtype=float).mean(axis=-2)


@dataclass(eq=False)
class SimulationResult:
    scenario_name: str
    seed: int
    run_index: int
    network_ids: list[str]
    device_ids: list[str]
    iteration_length: int
    # T x N
    choices: np.ndarray
    gains: np.ndarray
    rewards: np.ndarray
    # T
    min_rate: np.ndarray
    opt_min: np.ndarray
    distance: np.ndarray
    # T x K
    combined: np.ndarray
    # N x K x T normalized reward each network would have paid each device
    counterfactual: np.ndarray
    clipped_rewards: int = 0
    elapsed: float = 0.0
    partitions: PartitionSet | None = field(default=None, repr=False)

    @property
    def horizon(self) -> int:
        return int(self.choices.shape[0])

    @property
    def iterations(self) -> int:
        return self.horizon // self.iteration_length

    def cumulative_gb(self) -> np.ndarray:
        """Per-device download over the whole run in GB."""
        return self.gains.sum(axis=0) * GB_PER_MBPS_SLOT

    def per_iteration_distance(self) -> np.ndarray:
        return self.distance.reshape(self.iterations, self.iteration_length).mean(axis=1)

    def device_regret(self, partitions: PartitionSet | None = None) -> list[RegretReport]:
        """Each device's regret against the generalized periodic OPT of its own rewards."""
        F = partitions if partitions is not None else self.partitions
        if F is None:
            raise SimulationError("no period set to measure regret against")
        return [
            generalized_periodic_regret(
                F,
                RewardMatrix(values=self.counterfactual[d].astype(float)),
                self.rewards[:, d],
            )
            for d in range(len(self.device_ids))
        ]

    def iter_records(self) -> Iterator[StepRecord]:
        for step in range(self.horizon):
            yield StepRecord(
                slot=step + 1,
                iteration=step // self.iteration_length + 1,
                choices=tuple(self.network_ids[arm] for arm in self.choices[step]),
                gains=tuple(float(g) for g in self.gains[step]),
                min_rate=float(self.min_rate[step]),
                opt_min=float(self.opt_min[step]),
                distance_pct=float(self.distance[step]),
                combined=tuple(float(p) for p in self.combined[step]),
            )


def make_generators(
    seed: int, run_index: int, num_devices: int
) -> tuple[np.random.Generator, list[np.random.Generator]]:
    """Environment generator and one generator per device for run `run_index`."""
    children = np.random.SeedSequence([seed, run_index]).spawn(1 + num_devices)
    return (
        np.random.default_rng(children[0]),
        [np.random.default_rng(child) for child in children[1:]],
    )


def _make_policies(plan: ScenarioPlan) -> list[Policy]:
    return [
        make_policy(
            device.policy,
            num_arms=plan.num_networks,
            partitions=plan.partitions,
            config=plan.policy_config,
        )
        for device in plan.devices
    ]


def run_simulation(
    scenario: ScenarioConfig | ScenarioPlan, seed: int, run_index: int = 0
) -> SimulationResult:
    """
    Run one seeded simulation. The output is a pure function of
    (scenario, seed, run_index).
    """
    plan = scenario if isinstance(scenario, ScenarioPlan) else compile_scenario(scenario)
    try:
        return _run(plan, seed, run_index)
    except PeriodexError:
        raise
    except Exception as e:
        raise SimulationError(f"run {run_index} of {plan.name} failed: {e}") from e


def _run(plan: ScenarioPlan, seed: int, run_index: int) -> SimulationResult:
    start = time.monotonic()
    T, L = plan.horizon, plan.iteration_length
    N, K = plan.num_devices, plan.num_networks
    env_rng, device_rngs = make_generators(seed, run_index, N)
    policies = _make_policies(plan)
    everywhere = np.ones(K, dtype=bool)

    choices = np.zeros((T, N), dtype=np.intp)
    gains = np.zeros((T, N))
    rewards = np.zeros((T, N))
    min_rate = np.zeros(T)
    opt_min = np.zeros(T)
    distance = np.zeros(T)
    combined = np.zeros((T, K))
    counterfactual = np.zeros((N, K, T), dtype=np.float32)
    played = np.zeros((N, K))
    played_prob = np.zeros(N)
    clipped = 0

    for step in range(T):
        t = step + 1
        phase = int(plan.phase_of_slot[step % L])
        available = plan.masks[phase]
        active = available.any(axis=1)
        bandwidths = bandwidths_at(plan.curves, plan.noise_pct, t, env_rng)

        for d, policy in enumerate(policies):
            # stranded vanilla devices still pick, every pick earns 0
            reachable = available[d] if active[d] else everywhere
            dist: ArmDistribution = policy.distribution(
                SlotContext(bandwidths=bandwidths, available=reachable)
            )
            if plan.aware[d]:
                dist = restrict_to_available(dist, reachable)
            arm = sample_arm(dist, device_rngs[d])
            choices[step, d] = arm
            played[d] = dist.probs
            played_prob[d] = dist.probs[arm]

        gains[step], counts = simulate_round(bandwidths, choices[step], available)
        scaled = gains[step] / plan.reward_scale
        clipped += int(np.count_nonzero(scaled > 1.0))
        rewards[step] = np.clip(scaled, 0.0, 1.0)
        counterfactual[:, :, step] = np.clip(
            counterfactual_gains(bandwidths, choices[step], available, counts)
            / plan.reward_scale,
            0.0,
            1.0,
        )
        for d, policy in enumerate(policies):
            policy.update(int(choices[step, d]), float(rewards[step, d]), played_prob[d])

        combined[step] = combined_probabilities(played)
        if active.any():
            min_rate[step] = gains[step][active].min()
            opt_min[step] = optimal_min_rate_for_groups(bandwidths, plan.groups[phase])
            distance[step] = max(0.0, distance_pct(min_rate[step], opt_min[step]))

    elapsed = time.monotonic() - start
    if clipped:
        logger.warning(
            f"{plan.name} run {run_index}: {clipped} rewards above the reward scale were clipped to 1"
        )
    logger.debug(f"Max-min oracle cache: {cache_info()}")
    logger.info(
        f"{plan.name} run {run_index} (seed {seed}) finished {T} slots in {get_human_delta(elapsed)}"
    )
    return SimulationResult(
        scenario_name=plan.name,
        seed=seed,
        run_index=run_index,
        network_ids=plan.network_ids,
        device_ids=plan.device_ids(),
        iteration_length=L,
        choices=choices,
        gains=gains,
        rewards=rewards,
        min_rate=min_rate,
        opt_min=opt_min,
        distance=distance,
        combined=combined,
        counterfactual=counterfactual,
        clipped_rewards=clipped,
        elapsed=elapsed,
        partitions=plan.partitions,
    )