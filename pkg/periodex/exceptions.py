# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict
from typing import Any


class PeriodexError(Exception):
    pass


class PartitionError(PeriodexError, ValueError):
    pass


class PolicyError(PeriodexError, ValueError):
    pass


class RewardRangeError(PolicyError):
    pass


class MissingDistributionError(PeriodexError, RuntimeError):
    """
    Raised when a learner is asked to update without a pending distribution
    for the current time step.
    """


class ReferenceOracleInfeasible(PeriodexError, ValueError):
    def __init__(self, num_experts: int, cap: int, *args: Any) -> None:
        self.num_experts: int = num_experts
        self.cap: int = cap
        super().__init__(
            f"reference oracle infeasible: {num_experts} experts exceed the cap of {cap}",
            *args,
        )


class InfeasibleAvailabilityError(PeriodexError, ValueError):
    pass


class ScenarioConfigError(PeriodexError, ValueError):
    """
    Scenario schema violation. `errors` keeps one entry per offending field path.
    """

    def __init__(self, message: str, errors: list[str] | None = None) -> None:
        self.errors: list[str] = errors or []
        super().__init__(message)


class SimulationError(PeriodexError, RuntimeError):
    pass
