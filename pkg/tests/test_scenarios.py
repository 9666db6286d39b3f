import json
from pathlib import Path
from typing import Any, Callable

import pytest
import yaml
from pydantic import ValidationError

from periodex.core.partitions import PartitionStyle
from periodex.core.policies import NumericMode, PolicyName, Variant
from periodex.exceptions import ScenarioConfigError
from periodex.netsim.allocation import optimal_min_rate_for_groups
from periodex.netsim.simulator import compile_scenario
from periodex.scenarios.loader import (
    dump_scenario,
    list_builtins,
    load_scenario,
    override_scenario,
    parse_scenario,
)
from periodex.scenarios.models import DeviceVariant, PeriodSetConfig, ScenarioConfig

ScenarioFactory = Callable[..., ScenarioConfig]

BUILTINS = [
    "alternating_toy",
    "continuous",
    "continuous_hard",
    "cyclic_toy",
    "discrete",
    "mobility",
    "noisy_continuous",
    "noisy_discrete",
]


def test_list_builtins() -> None:
    assert list_builtins() == BUILTINS


def test_discrete_builtin() -> None:
    scenario = load_scenario("discrete")
    assert scenario.num_devices == 20
    assert scenario.network_ids() == ["wifi_a", "wifi_b", "cellular"]
    assert scenario.horizon == 86_400
    assert scenario.period_set.label() == "{1..24}"
    assert scenario.device_variant is DeviceVariant.AVAILABILITY_AWARE
    table = scenario.curve_table()
    assert table.shape == (3, 1440)
    assert table[:, 0].tolist() == [8.0, 4.0, 12.0]
    assert table[:, 1439].tolist() == [6.0, 16.0, 6.0]
    assert scenario.effective_reward_scale() == 4.0


def test_noisy_builtins_add_noise() -> None:
    for name in ("noisy_discrete", "noisy_continuous"):
        assert all(network.noise_pct == 0.1 for network in load_scenario(name).networks)


def test_mobility_builtin() -> None:
    scenario = load_scenario("mobility")
    assert scenario.num_devices == 20
    assert scenario.num_networks == 9
    assert scenario.phase_ends() == [780, 840, 1020, 1080, 1380, 1440]
    assert scenario.device_variant is DeviceVariant.VANILLA
    devices = scenario.devices()
    assert [device.id for device in devices[:2]] == ["home_1", "home_2"]
    assert all(len(device.availability) == 6 for device in devices)
    plan = compile_scenario(scenario)
    assert plan.reward_scale == 4.0
    for phase, groups in enumerate(plan.groups):
        assert optimal_min_rate_for_groups(plan.curves[:, 0], groups) == 2.0, phase


def test_alternating_toy_builtin() -> None:
    scenario = load_scenario("alternating_toy")
    assert scenario.num_networks == 2
    assert scenario.curve_table().tolist() == [[1.0, 0.0], [0.0, 1.0]]
    assert scenario.effective_reward_scale() == 1.0
    assert [device.id for device in scenario.devices()] == ["player"]


def test_builtins_survive_dump_and_parse() -> None:
    for name in BUILTINS:
        scenario = load_scenario(name)
        assert parse_scenario(dump_scenario(scenario)) == scenario


def test_load_json_file(tmp_path: Path) -> None:
    data = load_scenario("alternating_toy").model_dump(mode="json", exclude_none=True)
    data["name"] = "from_json"
    path = tmp_path / "toy.json"
    path.write_text(json.dumps(data))
    scenario = load_scenario(path)
    assert scenario.name == "from_json"
    assert scenario.iteration_length == 2


def test_malformed_file_lists_field_paths(tmp_path: Path) -> None:
    data = load_scenario("discrete").model_dump(mode="json", exclude_none=True)
    data["networks"][0]["noise_pct"] = -1
    data["iterations"] = 0
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump(data))
    with pytest.raises(ScenarioConfigError) as info:
        load_scenario(path)
    paths = [line.split(":")[0] for line in info.value.errors]
    assert "networks.0.noise_pct" in paths
    assert "iterations" in paths
    assert "errors.pydantic.dev" not in str(info.value)
    assert str(path) in str(info.value)


def test_unknown_sources() -> None:
    with pytest.raises(ScenarioConfigError, match="unknown scenario"):
        load_scenario("office_party")
    with pytest.raises(ScenarioConfigError, match="not found"):
        load_scenario("missing.yaml")
    with pytest.raises(ScenarioConfigError, match="mapping"):
        parse_scenario("- just\n- a list\n")
    with pytest.raises(ScenarioConfigError, match="cannot parse"):
        parse_scenario("name: [unclosed")
    with pytest.raises(ScenarioConfigError, match="cannot parse"):
        parse_scenario("{", fmt="json")


def test_consistency_checks(scenario_factory: ScenarioFactory) -> None:
    curve = {"kind": "values", "values": [1, 1, 1, 1]}
    cases: list[tuple[dict[str, Any], str]] = [
        (
            {"networks": [{"id": "a", "curve": curve}, {"id": "a", "curve": curve}]},
            "network ids must be unique",
        ),
        (
            {
                "networks": [
                    {
                        "id": "a",
                        "curve": {"kind": "segments", "segments": [{"end_slot": 3, "mbps": 1}]},
                    }
                ]
            },
            "segments must end at slot 4",
        ),
        ({"networks": [{"id": "a", "curve": {"kind": "values", "values": [1]}}]}, "1 values"),
        ({"phases": [2, 3]}, "phases must be increasing"),
        (
            {"phases": [2, 4], "device_groups": [{"name": "d", "availability": [["a"]]}]},
            "1 availability entries for 2 phases",
        ),
        (
            {"device_groups": [{"name": "d", "availability": [["wifi"]]}]},
            "unknown networks ['wifi']",
        ),
        (
            {"device_groups": [{"name": "d", "availability": [[]]}]},
            "only the vanilla variant",
        ),
        ({"period_set": {"max_period": 5}}, "maximum period 5 exceeds 4"),
        ({"period_set": {"max_period": 2, "periods": [2]}}, "exactly one of"),
        ({"period_set": {"sequences": [[1, 2]]}}, "must have 4 entries"),
        ({"device_groups": [{"name": "d"}, {"name": "d"}]}, "group names must be unique"),
        ({"colour": "blue"}, "Extra inputs are not permitted"),
    ]
    for overrides, message in cases:
        with pytest.raises(ValidationError) as info:
            scenario_factory(**overrides)
        assert message in str(info.value), overrides


def test_empty_phase_is_fine_for_vanilla(scenario_factory: ScenarioFactory) -> None:
    scenario = scenario_factory(
        phases=[2, 4],
        device_groups=[{"name": "d", "variant": "vanilla", "availability": [[], ["a"]]}],
    )
    assert scenario.devices()[0].availability == [[], ["a"]]


def test_modular_periods_may_exceed_the_iteration(scenario_factory: ScenarioFactory) -> None:
    scenario = scenario_factory(period_set={"style": "modular", "max_period": 6})
    assert len(scenario.partition_set()) == 6


def test_device_ids_and_overrides(scenario_factory: ScenarioFactory) -> None:
    scenario = scenario_factory(
        device_groups=[
            {"name": "solo"},
            {"name": "pack", "count": 2, "policy": "exp3", "variant": "vanilla"},
        ]
    )
    devices = scenario.devices()
    assert [device.id for device in devices] == ["solo", "pack_1", "pack_2"]
    assert devices[0].policy is PolicyName.PERIODIC_EXP4
    assert devices[1].policy is PolicyName.EXP3
    assert devices[2].variant is DeviceVariant.VANILLA


def test_override_scenario(tiny_scenario: ScenarioConfig) -> None:
    updated = override_scenario(
        tiny_scenario,
        iterations=9,
        seed=None,
        **{"policy.variant": "corrected", "policy.numeric_mode": "max_approx"},
    )
    assert updated.iterations == 9
    assert updated.seed == tiny_scenario.seed
    assert updated.policy.variant is Variant.CORRECTED
    assert updated.policy.numeric_mode is NumericMode.MAX_APPROX
    assert tiny_scenario.iterations == 5

    with pytest.raises(ScenarioConfigError) as info:
        override_scenario(tiny_scenario, iterations=0)
    assert info.value.errors[0].startswith("iterations:")


def test_period_set_config() -> None:
    assert PeriodSetConfig(max_period=15).label() == "{1..15}"
    assert PeriodSetConfig(periods=[4]).label() == "{4}"
    assert PeriodSetConfig(max_period=1).label() == "{1}"
    assert PeriodSetConfig(sequences=[[1, 2], [1, 1]]).label() == "explicit[2]"
    assert PeriodSetConfig(sequences=[[1, 3]]).largest_period() == 3

    F = PeriodSetConfig(sequences=[[1, 2], [5, 5]]).build(2, 6)
    assert F.names() == ["explicit:1", "explicit:2"]
    assert F[0].labels.tolist() == [1, 2, 1, 2, 1, 2]

    modular = PeriodSetConfig(style=PartitionStyle.MODULAR, periods=[3]).build(4, 8)
    assert modular[0].labels.tolist() == [1, 2, 3, 1, 2, 3, 1, 2]
    with pytest.raises(ValueError):
        PeriodSetConfig()
    with pytest.raises(ValueError):
        PeriodSetConfig(periods=[])
