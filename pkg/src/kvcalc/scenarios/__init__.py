"""Named verification scenarios, their runner, and the CLI."""
from .model import Assertion, Scenario, ScenarioFormatError, scenario_from_toml, scenario_to_toml
from .probes import PROBES, ScenarioSetupError
from .registry import SCENARIOS, get_scenario, scenario_names
from .runner import (
    AssertionResult,
    FuzzReport,
    ScenarioReport,
    available_scenarios,
    combined_json,
    obstruction_check_6_2,
    report_to_json_dict,
    run_all,
    run_d2_fuzz,
    run_scenario,
)

__all__ = [
    "Assertion", "Scenario", "ScenarioFormatError",
    "scenario_from_toml", "scenario_to_toml",
    "PROBES", "ScenarioSetupError",
    "SCENARIOS", "get_scenario", "scenario_names",
    "AssertionResult", "FuzzReport", "ScenarioReport",
    "available_scenarios", "combined_json", "obstruction_check_6_2",
    "report_to_json_dict", "run_all", "run_d2_fuzz", "run_scenario",
]
