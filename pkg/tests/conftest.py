import sys
from typing import Any, Callable, Iterator

import pytest
from loguru import logger

from periodex.scenarios.models import ScenarioConfig


@pytest.fixture(autouse=True)
def _reset_logger() -> Iterator[None]:
    # the CLI swaps loguru handlers; restore a plain stderr sink afterwards
    yield
    logger.remove()
    logger.add(sys.stderr, level="WARNING")


@pytest.fixture
def log_messages() -> Iterator[list[str]]:
    messages: list[str] = []
    handler_id = logger.add(lambda message: messages.append(str(message)), level="DEBUG")
    yield messages
    try:
        logger.remove(handler_id)
    except ValueError:
        pass


def _build_scenario(**overrides: Any) -> ScenarioConfig:
    data: dict[str, Any] = {
        "name": "tiny",
        "iteration_length": 4,
        "iterations": 5,
        "networks": [
            {"id": "a", "curve": {"kind": "values", "values": [10, 2, 6, 4]}},
            {"id": "b", "curve": {"kind": "values", "values": [3, 8, 6, 1]}},
            {"id": "c", "curve": {"kind": "values", "values": [5, 5, 5, 5]}},
        ],
        "device_groups": [{"name": "dev", "count": 3}],
        "period_set": {"max_period": 4},
        "runs": 2,
    }
    data.update(overrides)
    return ScenarioConfig.model_validate(data)


@pytest.fixture
def scenario_factory() -> Callable[..., ScenarioConfig]:
    return _build_scenario


@pytest.fixture
def tiny_scenario() -> ScenarioConfig:
    return _build_scenario()
