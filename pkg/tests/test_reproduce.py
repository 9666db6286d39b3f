from pathlib import Path
from typing import Any

import pytest

from periodex.exceptions import ScenarioConfigError
from periodex.runner.experiment import PeriodSetSweep, PolicyComparison
from scripts import reproduce


def test_parse_args_defaults() -> None:
    args = reproduce.parse_args([])
    assert args.out_dir == Path("results")
    assert (args.iterations, args.runs, args.parallel) == (20, 5, 4)
    assert args.full is False
    assert args.only is None


def test_parse_args_repeated_only() -> None:
    args = reproduce.parse_args(["--only", "sweep", "--only", "mobility", "--full"])
    assert args.only == ["sweep", "mobility"]
    assert args.full is True
    with pytest.raises(SystemExit):
        reproduce.parse_args(["--only", "plots"])


def test_main_runs_only_the_requested_experiments(
    monkeypatch: pytest.MonkeyPatch, tmp_path: Path
) -> None:
    calls: list[tuple[str, str, int]] = []

    def fake_sweep(scenario: Any, period_sets: list[Any], **kwargs: Any) -> PeriodSetSweep:
        calls.append(("sweep", scenario.name, scenario.iterations))
        assert [p.max_period for p in period_sets] == [None, None, 15, 24, 45]
        assert kwargs["out_dir"] == tmp_path / "sweep"
        return PeriodSetSweep(scenario=scenario.name, summaries={})

    def fake_compare(*args: Any, **kwargs: Any) -> PolicyComparison:
        raise AssertionError("compare was not requested")

    monkeypatch.setattr(reproduce, "sweep_period_sets", fake_sweep)
    monkeypatch.setattr(reproduce, "compare_policies", fake_compare)
    reproduce.main(["--only", "sweep", "--iterations", "2", "--out-dir", str(tmp_path)])
    assert calls == [("sweep", "discrete", 2)]


def test_main_full_keeps_scenario_sizes(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    sizes: dict[str, tuple[int, int]] = {}

    def fake_compare(scenario: Any, policies: Any, **kwargs: Any) -> PolicyComparison:
        sizes[scenario.name] = (scenario.iterations, scenario.runs)
        assert list(policies) == list(reproduce.POLICIES)
        return PolicyComparison(scenario=scenario.name, summaries={})

    monkeypatch.setattr(reproduce, "compare_policies", fake_compare)
    reproduce.main(["--only", "compare", "--full", "--out-dir", str(tmp_path)])
    assert set(sizes) == set(reproduce.COMPARISONS)
    assert sizes["discrete"] == (60, 20)
    assert sizes["continuous_hard"][0] == 100


def test_main_exits_on_configuration_errors(
    monkeypatch: pytest.MonkeyPatch, tmp_path: Path
) -> None:
    def broken(*args: Any, **kwargs: Any) -> None:
        raise ScenarioConfigError("bad scenario")

    monkeypatch.setattr(reproduce, "run_experiment", broken)
    with pytest.raises(SystemExit) as info:
        reproduce.main(["--only", "mobility", "--out-dir", str(tmp_path)])
    assert info.value.code == 1
