"""Scenario registry, TOML round-trips, runner semantics, CLI exit codes."""
from __future__ import annotations

import json

import pytest

from kvcalc.fields import ProbeConfig
from kvcalc.scenarios import cli
from kvcalc.scenarios.model import (
    Assertion,
    Scenario,
    ScenarioFormatError,
    scenario_from_toml,
    scenario_to_toml,
)
from kvcalc.scenarios.probes import PROBES, ScenarioSetupError
from kvcalc.scenarios.registry import SCENARIOS, get_scenario, scenario_names
from kvcalc.scenarios.runner import (
    available_scenarios,
    obstruction_check_6_2,
    run_scenario,
)

FAST = ProbeConfig(samples=40, tolerance=1e-9, seed=42)

_PLANE = {"coords": ["x", "y"], "box": [[-2.0, 2.0], [-2.0, 2.0]]}


def test_registry_has_all_sections_of_the_study():
    names = scenario_names()
    assert len(names) == 21
    assert len(set(names)) == 21
    for scn in SCENARIOS:
        assert scn.assertions, scn.name
        for a in scn.assertions:
            assert a.probe in PROBES, (scn.name, a.probe)


def test_get_scenario_unknown_raises():
    with pytest.raises(KeyError):
        get_scenario("nope")


@pytest.mark.parametrize("name", scenario_names())
def test_toml_round_trip(name):
    scn = get_scenario(name)
    text = scenario_to_toml(scn)
    back = scenario_from_toml(text)
    assert back == scn


@pytest.mark.parametrize("name", scenario_names())
def test_scenario_passes(name):
    rep = run_scenario(name, ProbeConfig(samples=60, tolerance=1e-9, seed=42))
    assert rep.passed, rep.render_text()


def test_report_dict_is_deterministic():
    a = run_scenario("remark_3_4", FAST).to_json_dict()
    b = run_scenario("remark_3_4", FAST).to_json_dict()
    assert a == b
    assert a["elapsed_ms"] == 0
    assert json.dumps(a) == json.dumps(b)


def test_report_schema_fields():
    rep = run_scenario("example_3_1", FAST)
    d = rep.to_json_dict()
    assert set(d) == {"scenario", "assertions", "verdict", "seed",
                      "elapsed_ms"}
    for row in d["assertions"]:
        assert set(row) == {"name", "paper_ref", "max_residual",
                            "tolerance", "expected", "verdict"}


def test_seed_changes_report():
    a = run_scenario("example_3_2", FAST)
    b = run_scenario("example_3_2",
                     ProbeConfig(samples=40, tolerance=1e-9, seed=43))
    ra = [r.max_residual for r in a.results]
    rb = [r.max_residual for r in b.results]
    assert ra != rb


def test_obstruction_check_entry_point():
    rep = obstruction_check_6_2(FAST)
    assert rep.scenario == "example_6_2_obstruction"
    assert rep.passed
    names = [r.name for r in rep.results]
    assert "not_extendable" in names


def test_setup_error_on_curved_context():
    scn = Scenario(
        name="curved_context",
        doc="context admission must reject a curved connection",
        chart={"coords": ["x", "y"], "box": [[-2.0, 2.0], [0.5, 2.0]]},
        bindings={
            "metrics": {"g": {"kind": "conformal_euclidean",
                              "factor": "1/y^2"}},
            "connections": {"lc": {"kind": "levi_civita", "metric": "g"}},
        },
        context={"connection": "lc"},
        assertions=[Assertion("never_runs", "connection_flat",
                              {"connection": "lc"})],
    )
    with pytest.raises(ScenarioSetupError):
        run_scenario(scn, FAST)


def test_setup_error_on_missing_binding():
    scn = Scenario(
        name="missing_binding",
        doc="",
        chart=_PLANE,
        bindings={"cochains": {"a": {"kind": "ad", "field": "nope"}}},
        context=None,
        assertions=[Assertion("x", "kv_zero", {"cochain": "a"})],
    )
    with pytest.raises(ScenarioSetupError):
        run_scenario(scn, FAST)


def test_setup_error_on_cycle():
    scn = Scenario(
        name="cycle",
        doc="",
        chart=_PLANE,
        bindings={"cochains": {
            "a": {"kind": "scale", "of": "b", "factor": 2},
            "b": {"kind": "scale", "of": "a", "factor": 2},
        }},
        context=None,
        assertions=[Assertion("x", "kv_zero", {"cochain": "a"})],
    )
    with pytest.raises(ScenarioSetupError):
        run_scenario(scn, FAST)


def test_expected_fail_requires_witness():
    # a codazzi check that holds, declared expect=fail, must not count
    scn = Scenario(
        name="unwitnessed",
        doc="",
        chart=_PLANE,
        bindings={
            "metrics": {"h": {"kind": "diagonal",
                              "entries": ["1 + x^2", "1"]}},
            "connections": {"flat": {"kind": "flat"}},
        },
        context={"connection": "flat"},
        assertions=[Assertion("should_fail_but_holds", "codazzi",
                              {"tensor": "h", "connection": "flat"},
                              expect="fail")],
    )
    rep = run_scenario(scn, FAST)
    assert not rep.passed
    assert rep.results[0].verdict == "pass"
    assert rep.results[0].expected == "fail"


def test_scenario_dir_loading_and_shadowing(tmp_path):
    scn = get_scenario("remark_3_4")
    # a renamed copy, and a shadowing copy under the registry name
    other = Scenario(name="local_variant", doc=scn.doc, chart=scn.chart,
                     bindings=scn.bindings, context=scn.context,
                     assertions=scn.assertions)
    (tmp_path / "variant.toml").write_text(scenario_to_toml(other))
    (tmp_path / "shadow.toml").write_text(scenario_to_toml(scn))
    names = available_scenarios(tmp_path)
    assert "local_variant" in names
    assert names.count("remark_3_4") == 1
    rep = run_scenario("local_variant", FAST, scenario_dir=tmp_path)
    assert rep.passed


def test_scenario_dir_duplicate_name_rejected(tmp_path):
    scn = get_scenario("remark_3_4")
    (tmp_path / "a.toml").write_text(scenario_to_toml(scn))
    (tmp_path / "b.toml").write_text(scenario_to_toml(scn))
    with pytest.raises(ScenarioSetupError):
        available_scenarios(tmp_path)


def test_toml_reject_malformed():
    with pytest.raises(ScenarioFormatError):
        scenario_from_toml("this is not toml [ [")
    with pytest.raises(ScenarioFormatError):
        scenario_from_toml('name = "x"\n')  # missing required tables


def test_cli_run_single_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = cli.main(["run", "prop_4_1", "--format", "json",
                     "--samples", "40", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["verdict"] == "pass"
    assert data["seed"] == 42

    assert cli.main(["run", "definitely_not_a_scenario"]) == 2
    captured = capsys.readouterr()
    assert "unknown scenario" in captured.err


def test_cli_list(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "example_6_2_obstruction" in out
    assert len(out) == 21


def test_cli_d2_quick(capsys):
    code = cli.main(["d2", "--degree", "0", "--trials", "4",
                     "--samples", "40"])
    assert code == 0
    assert "pass" in capsys.readouterr().out


def test_cli_text_format_shows_residuals(capsys):
    code = cli.main(["run", "example_3_1", "--samples", "40"])
    assert code == 0
    out = capsys.readouterr().out
    assert "max residual" in out
    assert "scenario example_3_1" in out
