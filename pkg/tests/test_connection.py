"""Christoffel symbols, curvature, conjugates, and derived scalar operators,
checked against hand-computed values."""
from __future__ import annotations

import math

import pytest

from kvcalc.chart import Chart
from kvcalc.connection import (
    average,
    codazzi_probe,
    conjugate,
    cov_deriv_tensor02,
    cov_deriv_vf,
    curvature_tensor_comps,
    differential,
    flat_connection,
    flatness_probe,
    grad,
    hessian,
    laplacian,
    levi_civita,
    metric_compat_probe,
    torsion_probe,
)
from kvcalc.expr import evaluate
from kvcalc.fields import (
    MetricField,
    ProbeConfig,
    VectorField,
    coordinate_fields,
)
from kvcalc.parse import parse

CHART = Chart(("x", "y"), ((-2.0, 2.0), (-2.0, 2.0)))
CFG = ProbeConfig(samples=60, seed=3)


def _g_exp():
    # Hess(e^x + e^y) = diag(e^x, e^y)
    return MetricField.from_potential(CHART, parse("exp(x) + exp(y)", CHART))


def _pt(x, y):
    return {"x": x, "y": y}


def test_levi_civita_of_euclidean_is_flat():
    lc = levi_civita(MetricField.euclidean(CHART))
    for k in range(2):
        for i in range(2):
            for j in range(2):
                assert evaluate(lc.gamma[k][i][j], _pt(0.3, -1.1)) == 0.0


def test_levi_civita_diag_exp_hand_symbols():
    # g = diag(e^x, e^y): the only nonzero symbols are
    # gamma^1_11 = 1/2 and gamma^2_22 = 1/2
    lc = levi_civita(_g_exp())
    pt = _pt(0.7, -0.4)
    for k in range(2):
        for i in range(2):
            for j in range(2):
                want = 0.5 if (k, i, j) in ((0, 0, 0), (1, 1, 1)) else 0.0
                assert evaluate(lc.gamma[k][i][j], pt) == pytest.approx(
                    want, abs=1e-15), (k, i, j)


def test_levi_civita_metric_compatible_torsion_free():
    g = MetricField.from_potential(CHART,
                                   parse("exp(x) + exp(y) + exp(x + y)",
                                         CHART))
    lc = levi_civita(g)
    assert torsion_probe(lc, CFG).passed
    assert metric_compat_probe(lc, g, CFG).passed


def test_conjugate_of_flat_hand_symbols():
    # conjugate symbols for diag(e^x, e^y) against flat: the full
    # derivative of the metric lands on the starred side
    g = _g_exp()
    star = conjugate(flat_connection(CHART), g)
    pt = _pt(0.2, 1.3)
    for k in range(2):
        for i in range(2):
            for j in range(2):
                want = 1.0 if (k, i, j) in ((0, 0, 0), (1, 1, 1)) else 0.0
                assert evaluate(star.gamma[k][i][j], pt) == pytest.approx(
                    want, abs=1e-14), (k, i, j)


def test_conjugate_is_involutive():
    g = MetricField.from_potential(CHART,
                                   parse("exp(x) + exp(y) + x^2*y^2/10",
                                         CHART))
    c = flat_connection(CHART)
    back = conjugate(conjugate(c, g), g)
    for k in range(2):
        for i in range(2):
            for j in range(2):
                diff = evaluate(back.gamma[k][i][j], _pt(0.4, 0.6))
                assert diff == pytest.approx(0.0, abs=1e-12)


def test_midpoint_of_conjugate_pair_is_levi_civita():
    g = _g_exp()
    c = flat_connection(CHART)
    mid = average(c, conjugate(c, g))
    lc = levi_civita(g)
    pt = _pt(-0.8, 0.9)
    for k in range(2):
        for i in range(2):
            for j in range(2):
                assert evaluate(mid.gamma[k][i][j], pt) == pytest.approx(
                    evaluate(lc.gamma[k][i][j], pt), abs=1e-13)


def test_flatness_probe_flags_hyperbolic_halfplane():
    half = Chart(("x", "y"), ((-2.0, 2.0), (0.5, 2.0)))
    g = MetricField.conformal_euclidean(half, parse("1/y^2", half))
    lc = levi_civita(g)
    assert not flatness_probe(lc, CFG).passed


def test_halfplane_curvature_component():
    # R(d_x, d_y) d_x = y^-2 d_y for the y^-2 conformal metric
    half = Chart(("x", "y"), ((-2.0, 2.0), (0.5, 2.0)))
    g = MetricField.conformal_euclidean(half, parse("1/y^2", half))
    R = curvature_tensor_comps(levi_civita(g))
    pt = _pt(0.3, 1.2)
    got = evaluate(R[1][0][0][1], pt)  # k=2 component, l=1, (i,j)=(1,2)
    assert got == pytest.approx(1 / 1.2 ** 2, rel=1e-12)
    assert evaluate(R[0][0][0][1], pt) == pytest.approx(0.0, abs=1e-13)


def test_cov_deriv_vf_against_hand_formula():
    # for gamma^1_11 = 1/2 and X = d_x: D_X X = (1/2) d_x
    lc = levi_civita(_g_exp())
    e1, _ = coordinate_fields(CHART)
    D = cov_deriv_vf(lc, e1, e1)
    pt = _pt(1.1, 0.2)
    assert evaluate(D.components[0], pt) == pytest.approx(0.5)
    assert evaluate(D.components[1], pt) == 0.0


def test_cov_deriv_tensor_hand_value():
    # flat connection: (D_dx h)(dx, dx) = d/dx h_11 = e^x
    h = MetricField.diagonal(CHART, (parse("exp(x)", CHART),
                                     parse("exp(y)", CHART))).as_tensor()
    c = flat_connection(CHART)
    e1, _ = coordinate_fields(CHART)
    Dh = cov_deriv_tensor02(c, e1, h)
    assert evaluate(Dh.apply(e1, e1), _pt(0.6, 0.0)) == pytest.approx(
        math.exp(0.6), rel=1e-14)


def test_codazzi_hand_residual():
    # diag(1, 1+x^2) violates the coupling by exactly d/dx h_22 = 2x
    c = flat_connection(CHART)
    bad = MetricField.diagonal(CHART, (parse("1", CHART),
                                       parse("1 + x^2", CHART))).as_tensor()
    rep = codazzi_probe(bad, c, CFG)
    assert not rep.passed
    good = MetricField.diagonal(CHART, (parse("1 + x^2", CHART),
                                        parse("1", CHART))).as_tensor()
    assert codazzi_probe(good, c, CFG).passed


def test_hessian_potential_recovers_metric():
    phi = parse("exp(x) + exp(y) + exp(x + y)", CHART)
    h = hessian(phi, flat_connection(CHART))
    g = MetricField.from_potential(CHART, phi)
    pt = _pt(0.3, 0.8)
    for i in range(2):
        for j in range(2):
            assert evaluate(h.rows[i][j], pt) == pytest.approx(
                evaluate(g.entry(i, j), pt), rel=1e-14)


def test_grad_and_laplacian_euclidean():
    g = MetricField.euclidean(CHART)
    f = parse("x*y", CHART)
    gr = grad(f, g)
    pt = _pt(0.25, -1.5)
    assert evaluate(gr.components[0], pt) == pytest.approx(-1.5)
    assert evaluate(gr.components[1], pt) == pytest.approx(0.25)
    assert evaluate(laplacian(f, g), pt) == 0.0
    assert evaluate(laplacian(parse("x^2", CHART), g), pt) == pytest.approx(2.0)


def test_laplacian_log_radius_harmonic():
    punctured = Chart(("x", "y"), ((-2.0, 2.0), (-2.0, 2.0)),
                      (parse("x^2 + y^2 - 1/100", CHART),))
    g = MetricField.euclidean(punctured)
    lap = laplacian(parse("1/2*ln(x^2 + y^2)", punctured), g)
    assert evaluate(lap, _pt(0.8, -0.6)) == pytest.approx(0.0, abs=1e-13)


def test_differential_components():
    w = differential(parse("x^2*y", CHART), CHART)
    pt = _pt(0.5, 2.0 - 1e-9)
    assert evaluate(w.components[0], pt) == pytest.approx(2.0, rel=1e-6)


def test_connection_equality_ignores_label():
    a = flat_connection(CHART, label="one")
    b = flat_connection(CHART, label="two")
    assert a == b


def test_deformed_connection_loses_flatness():
    # adding the exp-potential conjugate's symbols to flat changes curvature
    g = _g_exp()
    star = conjugate(flat_connection(CHART), g)
    assert flatness_probe(star, CFG).passed  # Hessian case stays flat
    half = Chart(("x", "y"), ((-2.0, 2.0), (0.5, 2.0)))
    gh = MetricField.conformal_euclidean(half, parse("1/y^2", half))
    assert not flatness_probe(levi_civita(gh), CFG).passed
