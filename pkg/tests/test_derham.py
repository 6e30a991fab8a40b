"""Twisted exterior derivative: complex property, curvature defect,
decomposition over a trivialized flat chart."""
from __future__ import annotations

import numpy as np
import pytest

from kvcalc.chart import Chart
from kvcalc.connection import flat_connection, levi_civita
from kvcalc.derham import (
    DerhamError,
    TwistedForm,
    curvature_identity_probe,
    d2_flat_probe,
    d_nabla,
    dnabla_apply,
    flat_decomposition_probe,
    form_consistency_probe,
    random_twisted_form,
    scalar_exterior_derivative,
    twisted_form_from_terms,
    zero_twisted_form,
)
from kvcalc.fields import (
    MetricField,
    ProbeConfig,
    field_zero_probe,
    fields_equal_probe,
    random_vector_field,
)
from kvcalc.parse import parse

CHART3 = Chart(("x", "y", "z"), ((-1.5, 1.5),) * 3)
CFG = ProbeConfig(samples=60, seed=23)


def test_d_squared_flat_ten_random_forms():
    # ten random twisted 0- and 1-forms, alternating degree
    c = flat_connection(CHART3)
    rng = np.random.default_rng(31)
    for t in range(10):
        theta = random_twisted_form(CHART3, rng, degree=t % 2)
        rep = d2_flat_probe(c, theta, CFG)
        assert rep.passed and rep.max_residual <= 1e-9, (t, rep.max_residual)


def test_degree0_display():
    # d s (X) = D_X s for a 0-form (a plain vector field as form)
    c = flat_connection(CHART3)
    rng = np.random.default_rng(33)
    s = random_twisted_form(CHART3, rng, degree=0)
    d = d_nabla(c, s)
    X = random_vector_field(CHART3, rng)
    from kvcalc.connection import cov_deriv_vf

    want = cov_deriv_vf(c, X, s.evaluate())
    assert fields_equal_probe(d.evaluate(X), want, CFG).passed


def test_degree1_display():
    # d t (X,Y) = D_X t(Y) - D_Y t(X) - t([X,Y])
    c = flat_connection(CHART3)
    rng = np.random.default_rng(35)
    t = random_twisted_form(CHART3, rng, degree=1)
    d = d_nabla(c, t)
    X, Y = (random_vector_field(CHART3, rng) for _ in range(2))
    from kvcalc.connection import cov_deriv_vf
    from kvcalc.fields import lie_bracket

    want = (cov_deriv_vf(c, X, t.evaluate(Y))
            - cov_deriv_vf(c, Y, t.evaluate(X))
            - t.evaluate(lie_bracket(X, Y)))
    assert fields_equal_probe(d.evaluate(X, Y), want, CFG).passed


def test_antisymmetry_of_evaluate():
    rng = np.random.default_rng(37)
    t = random_twisted_form(CHART3, rng, degree=2)
    X, Y = (random_vector_field(CHART3, rng) for _ in range(2))
    swapped = t.evaluate(Y, X)
    straight = t.evaluate(X, Y)
    assert fields_equal_probe(straight, swapped.scaled(-1), CFG).passed
    assert field_zero_probe(t.evaluate(X, X), CFG).passed


def test_component_and_direct_routes_agree():
    c = flat_connection(CHART3)
    rng = np.random.default_rng(39)
    t = random_twisted_form(CHART3, rng, degree=1)
    assert form_consistency_probe(c, t, CFG).passed


def test_curvature_identity_nonflat():
    # d(d s) = R wedge s for the hyperbolic half-plane connection
    half = Chart(("x", "y"), ((-2.0, 2.0), (0.5, 2.0)))
    g = MetricField.conformal_euclidean(half, parse("1/y^2", half))
    lc = levi_civita(g)
    rng = np.random.default_rng(41)
    s = random_twisted_form(half, rng, degree=0)
    rep = curvature_identity_probe(lc, s,
                                   ProbeConfig(samples=60, seed=25,
                                               tolerance=1e-8))
    assert rep.passed, rep.max_residual
    # and the same defect is genuinely nonzero: d squared does not vanish
    assert not d2_flat_probe(lc, s, CFG).passed


def test_flat_decomposition_componentwise():
    punctured = Chart(
        ("x", "y"), ((-2.0, 2.0), (-2.0, 2.0)),
        (parse("x^2 + y^2 - 1/100",
               Chart(("x", "y"), ((-2, 2), (-2, 2)))),))
    c = flat_connection(punctured)
    rng = np.random.default_rng(43)
    for degree in (0, 1):
        t = random_twisted_form(punctured, rng, degree=degree)
        rep = flat_decomposition_probe(
            c, t, ProbeConfig(samples=50, seed=27, tolerance=1e-12))
        assert rep.passed, (degree, rep.max_residual)


def test_scalar_exterior_derivative_closed_angular_form():
    # w = (-y dx + x dy)/(x^2+y^2) has dw = 0 away from the origin
    punctured = Chart(
        ("x", "y"), ((-2.0, 2.0), (-2.0, 2.0)),
        (parse("x^2 + y^2 - 1/100",
               Chart(("x", "y"), ((-2, 2), (-2, 2)))),))
    comps = {
        (0,): parse("-y/(x^2 + y^2)", punctured),
        (1,): parse("x/(x^2 + y^2)", punctured),
    }
    d = scalar_exterior_derivative(punctured, 1, comps)
    from kvcalc.derham import _Components

    rep = field_zero_probe(
        _Components(punctured, tuple(d.values())),
        ProbeConfig(samples=60, seed=29))
    assert rep.passed


def test_form_from_terms_normalizes_indices():
    e = parse("x*y", CHART3)
    # (1,0) with sign flip equals -(0,1)
    a = twisted_form_from_terms(CHART3, 2, [((1, 0), 0, e)])
    b = twisted_form_from_terms(CHART3, 2, [((0, 1), 0, e)])
    rng = np.random.default_rng(45)
    X, Y = (random_vector_field(CHART3, rng) for _ in range(2))
    assert fields_equal_probe(a.evaluate(X, Y),
                              b.evaluate(X, Y).scaled(-1), CFG).passed


def test_form_from_terms_rejects_bad_indices():
    e = parse("x", CHART3)
    with pytest.raises(DerhamError):
        twisted_form_from_terms(CHART3, 1, [((5,), 0, e)])
    with pytest.raises(DerhamError):
        twisted_form_from_terms(CHART3, 1, [((0,), 7, e)])


def test_zero_form_and_degree_bounds():
    z = zero_twisted_form(CHART3, 1)
    rng = np.random.default_rng(47)
    X = random_vector_field(CHART3, rng)
    assert field_zero_probe(z.evaluate(X), CFG).passed
    with pytest.raises(DerhamError):
        zero_twisted_form(CHART3, 4)
    two = Chart(("x", "y"), ((0.0, 1.0), (0.0, 1.0)))
    t = random_twisted_form(two, rng, degree=2)
    with pytest.raises(DerhamError):
        d_nabla(flat_connection(two), t)


def test_dnabla_apply_arity_checked():
    c = flat_connection(CHART3)
    rng = np.random.default_rng(49)
    t = random_twisted_form(CHART3, rng, degree=1)
    X = random_vector_field(CHART3, rng)
    with pytest.raises(DerhamError):
        dnabla_apply(c, t, [X])
