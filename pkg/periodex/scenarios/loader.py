# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

import yaml
from loguru import logger

from ..exceptions import ScenarioConfigError
from ..utils.pydantic import sanitize_pydantic_validation_error
from .models import ScenarioConfig

BUILTIN_PACKAGE = "periodex.scenarios.builtin"


def list_builtins() -> list[str]:
    return sorted(
        entry.name.removesuffix(".yaml")
        for entry in resources.files(BUILTIN_PACKAGE).iterdir()
        if entry.name.endswith(".yaml")
    )


def _read_builtin(name: str) -> str:
    entry = resources.files(BUILTIN_PACKAGE).joinpath(f"{name}.yaml")
    if not entry.is_file():
        raise ScenarioConfigError(
            f"unknown scenario {name!r}; builtins are: {', '.join(list_builtins())}",
            [f"scenario: unknown builtin {name!r}"],
        )
    return entry.read_text(encoding="utf-8")


def parse_scenario(text: str, source: str = "<string>", fmt: str = "yaml") -> ScenarioConfig:
    try:
        data: Any = json.loads(text) if fmt == "json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ScenarioConfigError(f"cannot parse {source}: {e}", [f"<root>: {e}"]) from None
    if not isinstance(data, dict):
        raise ScenarioConfigError(
            f"{source}: a scenario must be a mapping", ["<root>: expected a mapping"]
        )
    with sanitize_pydantic_validation_error(source):
        return ScenarioConfig.model_validate(data)


def load_scenario(path_or_name: str | Path) -> ScenarioConfig:
    """
    Load a scenario from a YAML/JSON file, or a builtin by name (see `list_builtins`).
    """
    path = Path(path_or_name)
    if path.suffix.lower() in (".yaml", ".yml", ".json") or path.exists():
        if not path.is_file():
            raise ScenarioConfigError(f"scenario file {path} not found", [f"scenario: {path}"])
        fmt = "json" if path.suffix.lower() == ".json" else "yaml"
        scenario = parse_scenario(path.read_text(encoding="utf-8"), str(path), fmt)
    else:
        scenario = parse_scenario(_read_builtin(str(path_or_name)), f"builtin:{path_or_name}")
    logger.debug(
        f"Loaded scenario {scenario.name}: {scenario.num_devices} devices, "
        f"{scenario.num_networks} networks, {scenario.iterations} x {scenario.iteration_length} slots"
    )
    return scenario


def dump_scenario(scenario: ScenarioConfig) -> str:
    """YAML text that `parse_scenario` reads back into an equal scenario."""
    return yaml.safe_dump(
        scenario.model_dump(mode="json", exclude_none=True),
        sort_keys=False,
        default_flow_style=None,
    )


def override_scenario(scenario: ScenarioConfig, **update: Any) -> ScenarioConfig:
    """
    Apply overrides (dotted keys reach nested models, e.g. `policy.variant`) and
    re-validate the result.
    """
    data = scenario.model_dump(mode="json", exclude_none=True)
    for key, value in update.items():
        if value is None:
            continue
        target = data
        *parents, leaf = key.split(".")
        for parent in parents:
            target = target.setdefault(parent, {})
        target[leaf] = value
    with sanitize_pydantic_validation_error("overrides"):
        return ScenarioConfig.model_validate(data)
