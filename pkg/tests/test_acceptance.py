"""Acceptance gate: the ten headline checks, one test (and one printed
pass/fail line) per criterion, at the stated tolerances.

Run with -v for the per-criterion verdict lines; -s additionally shows the
printed summaries with measured residuals.
"""
from __future__ import annotations

import json
import time

import numpy as np
import pytest

from kvcalc.chart import Chart
from kvcalc.expr import evaluate
from kvcalc.fields import ProbeConfig, fields_equal_probe, lie_bracket, random_vector_field
from kvcalc.kv import (
    KVContext,
    ad_cochain,
    d_kv,
    identity_cochain,
    symmetry_probe,
    tensoriality_probe,
)
from kvcalc.connection import flat_connection
from kvcalc.derham import d2_flat_probe, random_twisted_form
from kvcalc.parse import parse
from kvcalc.scenarios import cli
from kvcalc.scenarios.model import Assertion, Scenario, scenario_to_toml
from kvcalc.scenarios.runner import run_d2_fuzz, run_scenario

CFG = ProbeConfig(samples=100, tolerance=1e-9, seed=42)


def _line(num: int, text: str):
    print(f"criterion {num:2d}: PASS - {text}")


def _rows(report) -> dict:
    return {r.name: r for r in report.results}


def _assert_row(report, name: str, bound: float):
    row = _rows(report)[name]
    assert row.ok, f"{report.scenario}/{name}: {row.max_residual:.3e}"
    assert row.max_residual <= bound, \
        f"{report.scenario}/{name}: {row.max_residual:.3e} > {bound:.1e}"
    return row.max_residual


def _assert_witnessed(report, name: str, floor: float = 1e-3):
    row = _rows(report)[name]
    assert row.ok and row.expected == "fail", f"{report.scenario}/{name}"
    assert row.max_residual >= floor, \
        f"{report.scenario}/{name}: witness {row.max_residual:.3e} < {floor}"


def test_criterion_01_d_squared_fuzz():
    started = time.perf_counter()
    worst = 0.0
    for degree in (0, 1, 2):
        rep = run_d2_fuzz(degree, 20, CFG)
        assert rep.passed, f"degree {degree}: {rep.max_residual:.3e}"
        assert rep.max_residual <= 1e-9
        worst = max(worst, rep.max_residual)
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"fuzz took {elapsed:.1f}s"
    _line(1, f"d(d theta)=0 over 60 random cochains, worst {worst:.2e}, "
             f"{elapsed:.1f}s")


def test_criterion_02_neg_identity_coboundary():
    rep = run_scenario("prop_4_1", CFG)
    assert rep.passed, rep.render_text()
    a = _assert_row(rep, "d_neg_id_is_nabla", 1e-12)
    b = _assert_row(rep, "d_nabla_is_zero", 1e-12)
    _line(2, f"d(-Id) = D and d(D) = 0, residuals {a:.1e} / {b:.1e}")


def test_criterion_03_ad_coboundaries_symmetric_tensorial():
    chart = Chart(("x", "y"), ((-2.0, 2.0), (-2.0, 2.0)))
    ctx = KVContext.admitted(chart, flat_connection(chart), CFG)
    rng = np.random.default_rng(301)
    worst = 0.0
    for _ in range(10):
        Z = random_vector_field(chart, rng)
        d = d_kv(ctx, ad_cochain(Z))
        s = symmetry_probe(ctx, d, CFG)
        t = tensoriality_probe(ctx, d, CFG)
        assert s.passed and s.max_residual <= 1e-9, s.max_residual
        assert t.passed and t.max_residual <= 1e-9, t.max_residual
        worst = max(worst, s.max_residual, t.max_residual)

    d_id = d_kv(ctx, identity_cochain(chart))
    tight = ProbeConfig(samples=100, tolerance=1e-10, seed=303)
    anti_worst = 0.0
    rng2 = np.random.default_rng(305)
    for _ in range(3):
        X, Y = (random_vector_field(chart, rng2) for _ in range(2))
        rep = fields_equal_probe(d_id(X, Y) - d_id(Y, X),
                                 lie_bracket(Y, X), tight)
        assert rep.passed and rep.max_residual <= 1e-10, rep.max_residual
        anti_worst = max(anti_worst, rep.max_residual)
    _line(3, f"10 random d(ad_Z) symmetric+tensorial (worst {worst:.1e}); "
             f"antisymmetric part of d(Id) = [Y,X] (worst {anti_worst:.1e})")


def test_criterion_04_symmetrized_oneform_on_r3():
    ok = run_scenario("prop_4_3_parallel", CFG)
    assert ok.passed, ok.render_text()
    a = _assert_row(ok, "d_zero", 1e-9)
    bad = run_scenario("prop_4_3_nonparallel", CFG)
    assert bad.passed, bad.render_text()
    _assert_witnessed(bad, "d_nonzero")
    _line(4, f"parallel form cocycle ({a:.1e}); non-parallel witnessed "
             f"{_rows(bad)['d_nonzero'].max_residual:.1e}")


def test_criterion_05_rank_one_tensor_cochain():
    ok = run_scenario("prop_4_5_codazzi", CFG)
    assert ok.passed, ok.render_text()
    a = _assert_row(ok, "d_zero", 1e-9)
    bad = run_scenario("prop_4_5_noncodazzi", CFG)
    assert bad.passed, bad.render_text()
    _assert_witnessed(bad, "codazzi_violated")
    _assert_witnessed(bad, "d_nonzero")
    _line(5, f"Codazzi pair cocycle ({a:.1e}); broken coupling witnessed "
             f"{_rows(bad)['codazzi_violated'].max_residual:.1e}")


def test_criterion_06_conjugate_connection_curvature():
    curv = run_scenario("thm_5_3_curvature", CFG)
    assert curv.passed, curv.render_text()
    a = _assert_row(curv, "d_star_4R_diagonal", 1e-8)
    b = _assert_row(curv, "d_star_4R_curved", 1e-8)
    mid = run_scenario("lemma_5_2_midpoint", CFG)
    assert mid.passed, mid.render_text()
    c = _assert_row(mid, "midpoint", 1e-10)
    cor = run_scenario("cor_5_4", CFG)
    assert cor.passed, cor.render_text()
    d = _assert_row(cor, "d_R_zero", 1e-8)
    _line(6, f"d(D*) = 4R ({a:.1e} flat, {b:.1e} curved); midpoint = "
             f"Levi-Civita ({c:.1e}); d(R) = 0 ({d:.1e})")


def test_criterion_07_conformal_cochains():
    harm = run_scenario("thm_5_5_harmonic", CFG)
    assert harm.passed, harm.render_text()
    for i in (1, 2, 3):
        _assert_row(harm, f"harmonic_{i}", 1e-10)
        _assert_row(harm, f"d_zero_{i}", 1e-9)
        _assert_row(harm, f"deformed_flat_{i}", 1e-9)
    non = run_scenario("thm_5_5_nonharmonic", CFG)
    assert non.passed, non.render_text()
    _assert_row(non, "laplacian_exact", 0.0)
    _assert_row(non, "component_ijji", 1e-9)
    _assert_row(non, "component_ijij", 1e-9)
    _assert_witnessed(non, "deformation_not_flat")
    _line(7, "three harmonic deformations closed and flat; x^2 case: "
             "laplacian exactly 2, component identities, flatness broken")


def test_criterion_08_punctured_plane_obstruction():
    cyc = run_scenario("example_6_2_cocycle", CFG)
    assert cyc.passed, cyc.render_text()
    a = _assert_row(cyc, "cocycle", 1e-9)
    obs = run_scenario("example_6_2_obstruction", CFG)
    assert obs.passed, obs.render_text()
    _assert_row(obs, "hessian_upper_branch", 1e-9)
    _assert_row(obs, "hessian_lower_branch", 1e-9)
    b = _assert_row(obs, "jump_is_pi", 1e-6)
    _assert_row(obs, "not_extendable", 1e-9)
    _line(8, f"cocycle on punctured plane ({a:.1e}); branch systems solve; "
             f"u_y jump = pi ({b:.1e}); non-extendability reported")


def test_criterion_09_twisted_de_rham():
    chart = Chart(("x", "y", "z"), ((-1.5, 1.5),) * 3)
    c = flat_connection(chart)
    rng = np.random.default_rng(901)
    worst = 0.0
    for t in range(10):
        theta = random_twisted_form(chart, rng, degree=t % 2)
        rep = d2_flat_probe(c, theta, CFG)
        assert rep.passed and rep.max_residual <= 1e-9, rep.max_residual
        worst = max(worst, rep.max_residual)

    app = run_scenario("appendix_dnabla", CFG)
    assert app.passed, app.render_text()
    a = _assert_row(app, "curvature_identity", 1e-8)
    dec = run_scenario("appendix_flat_decomposition", CFG)
    assert dec.passed, dec.render_text()
    b = _assert_row(dec, "decomposition_deg1", 1e-12)
    _assert_row(dec, "decomposition_deg0", 1e-12)
    lem = run_scenario("appendix_commuting_lemma", CFG)
    assert lem.passed, lem.render_text()
    _line(9, f"10 random flat d-squared ({worst:.1e}); curvature identity "
             f"({a:.1e}); decomposition ({b:.1e}); two-stage bracket lemma")


def test_criterion_10_determinism_and_cli(tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    argv = ["run", "all", "--format", "json", "--seed", "42",
            "--samples", "100"]
    assert cli.main(argv + ["--out", str(out1)]) == 0
    assert cli.main(argv + ["--out", str(out2)]) == 0
    b1 = out1.read_bytes()
    assert b1 == out2.read_bytes(), "reports differ between identical runs"
    payload = json.loads(b1)
    assert payload["verdict"] == "pass"
    assert len(payload["scenarios"]) == 21

    # exit codes: unknown scenario 2, assertion failure 1, setup failure 1
    assert cli.main(["run", "no_such_thing"]) == 2
    failing = Scenario(
        name="deliberate_failure", doc="",
        chart={"coords": ["x", "y"], "box": [[-2.0, 2.0], [-2.0, 2.0]]},
        bindings={
            "metrics": {"h": {"kind": "diagonal",
                              "entries": ["1", "1 + x^2"]}},
            "connections": {"flat": {"kind": "flat"}},
        },
        context={"connection": "flat"},
        assertions=[Assertion("holds", "codazzi",
                              {"tensor": "h", "connection": "flat"})],
    )
    broken = Scenario(
        name="broken_setup", doc="",
        chart={"coords": ["x", "y"], "box": [[-2.0, 2.0], [0.5, 2.0]]},
        bindings={
            "metrics": {"g": {"kind": "conformal_euclidean",
                              "factor": "1/y^2"}},
            "connections": {"lc": {"kind": "levi_civita", "metric": "g"}},
        },
        context={"connection": "lc"},
        assertions=[Assertion("x", "connection_flat",
                              {"connection": "lc"})],
    )
    d1 = tmp_path / "fail_dir"
    d1.mkdir()
    (d1 / "f.toml").write_text(scenario_to_toml(failing))
    assert cli.main(["run", "deliberate_failure",
                     "--scenario-dir", str(d1), "--samples", "40"]) == 1
    d2 = tmp_path / "broken_dir"
    d2.mkdir()
    (d2 / "b.toml").write_text(scenario_to_toml(broken))
    assert cli.main(["run", "broken_setup",
                     "--scenario-dir", str(d2), "--samples", "40"]) == 1

    # symbolic against central finite differences, rel tol 1e-5
    chart = Chart(("x", "y"), ((0.3, 1.7), (0.3, 1.7)))
    pool = ["exp(x)*sin(y)", "ln(x^2 + y^2)", "sqrt(x^2 + y^2)",
            "atan(x/y)", "x/2*ln(x^2 + y^2) + y*atan(x/y)",
            "x^4 - 2*x^2*y^2 + y^4", "1/(1 + x^2 + y^2)", "atan2(y, x)"]
    rng = np.random.default_rng(1001)
    pts = rng.uniform(0.3, 1.7, size=(100, 2))
    h = 1e-5
    for text in pool:
        e = parse(text, chart)
        for coord in ("x", "y"):
            de = e.diff(coord)
            for px, py in pts:
                pt = {"x": float(px), "y": float(py)}
                up = dict(pt)
                dn = dict(pt)
                up[coord] += h
                dn[coord] -= h
                fd = (evaluate(e, up) - evaluate(e, dn)) / (2 * h)
                sym = evaluate(de, pt)
                assert abs(fd - sym) <= 1e-5 * (1 + abs(sym)), (text, coord)
    _line(10, "byte-identical reports, exit codes 0/1/2, derivative "
              "cross-check at rel 1e-5")
