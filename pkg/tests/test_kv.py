"""The cochain complex: coboundary displays, admission rules, probes."""
from __future__ import annotations

import numpy as np
import pytest

from kvcalc.chart import Chart
from kvcalc.connection import (
    Connection,
    conjugate,
    cov_deriv_vf,
    flat_connection,
    levi_civita,
)
from kvcalc.expr import evaluate
from kvcalc.fields import (
    MetricField,
    ProbeConfig,
    VectorField,
    coordinate_fields,
    lie_bracket,
    random_vector_field,
)
from kvcalc.kv import (
    ContextError,
    KVContext,
    KVError,
    ad_cochain,
    cochain_zero_probe,
    cochain_zero_probe_exact,
    cochains_equal_probe,
    conformal_cochain,
    connection_cochain,
    curvature_cochain,
    d2_probe,
    d_kv,
    dual_projective_cochain,
    identity_cochain,
    jacobi_probe,
    nabla_cochain,
    projective_cochain,
    scalar_cochain,
    symmetry_probe,
    tensoriality_probe,
    vector_cochain,
)
from kvcalc.parse import parse

CHART = Chart(("x", "y"), ((-2.0, 2.0), (-2.0, 2.0)))
CFG = ProbeConfig(samples=60, seed=17)


@pytest.fixture(scope="module")
def ctx():
    return KVContext.admitted(CHART, flat_connection(CHART), CFG)


def _vf(*comps):
    return VectorField(CHART, tuple(parse(c, CHART) for c in comps))


def test_degree1_coboundary_display(ctx):
    # d theta (X,Y) = -D_X(theta(Y)) + theta(D_X Y) - D_{theta(X)} Y
    theta = ad_cochain(_vf("x^2", "x*y"))
    d = d_kv(ctx, theta)
    rng = np.random.default_rng(2)
    X, Y = (random_vector_field(CHART, rng) for _ in range(2))
    c = ctx.connection
    want = (cov_deriv_vf(c, X, theta(Y)).scaled(-1)
            + theta(cov_deriv_vf(c, X, Y))
            - cov_deriv_vf(c, theta(X), Y))
    from kvcalc.fields import fields_equal_probe
    assert fields_equal_probe(d(X, Y), want, CFG).passed


def test_degree2_coboundary_display(ctx):
    # d theta (X,Y,Z) = (D_Y theta)(X,Z) - (D_X theta)(Y,Z)
    #                   + D_{theta(X,Y) - theta(Y,X)} Z
    g = MetricField.euclidean(CHART)
    theta = conformal_cochain(g, parse("x*y", CHART))
    d = d_kv(ctx, theta)
    rng = np.random.default_rng(4)
    X, Y, Z = (random_vector_field(CHART, rng) for _ in range(3))
    c = ctx.connection
    want = (nabla_cochain(ctx, Y, theta)(X, Z)
            - nabla_cochain(ctx, X, theta)(Y, Z)
            + cov_deriv_vf(c, theta(X, Y) - theta(Y, X), Z))
    from kvcalc.fields import fields_equal_probe
    assert fields_equal_probe(d(X, Y, Z), want, CFG).passed


def test_scalar_cochain_collapsed_display(ctx):
    f = parse("exp(x) + y^2", CHART)
    theta = scalar_cochain(CHART, f)
    d = d_kv(ctx, theta)
    rng = np.random.default_rng(6)
    X, Y = (random_vector_field(CHART, rng) for _ in range(2))
    from kvcalc.expr import mul
    fY = VectorField(CHART, tuple(mul(f, c) for c in Y.components))
    want = cov_deriv_vf(ctx.connection, X, fY).scaled(-1)
    from kvcalc.fields import fields_equal_probe
    assert fields_equal_probe(d(X, Y), want, CFG).passed


def test_ad_reduction_and_symmetry(ctx):
    Z = _vf("x^2 + x*y", "y^2 - 2*x")
    d = d_kv(ctx, ad_cochain(Z))
    assert symmetry_probe(ctx, d, CFG).passed
    assert tensoriality_probe(ctx, d, CFG).passed
    c = ctx.connection
    rng = np.random.default_rng(8)
    X, Y = (random_vector_field(CHART, rng) for _ in range(2))
    want = (cov_deriv_vf(c, X, cov_deriv_vf(c, Y, Z))
            - cov_deriv_vf(c, cov_deriv_vf(c, X, Y), Z))
    from kvcalc.fields import fields_equal_probe
    assert fields_equal_probe(d(X, Y), want, CFG).passed


def test_identity_coboundary_antisymmetric_part(ctx):
    d = d_kv(ctx, identity_cochain(CHART))
    rng = np.random.default_rng(10)
    X, Y = (random_vector_field(CHART, rng) for _ in range(2))
    from kvcalc.fields import fields_equal_probe
    # d(Id)(X,Y) = -D_X Y, so the antisymmetric part is [Y,X]
    assert fields_equal_probe(
        d(X, Y), cov_deriv_vf(ctx.connection, X, Y).scaled(-1), CFG).passed
    assert fields_equal_probe(
        d(X, Y) - d(Y, X), lie_bracket(Y, X), CFG).passed


def test_d_squared_vanishes_low_degrees(ctx):
    g = MetricField.euclidean(CHART)
    for theta in (
        ad_cochain(_vf("x*y", "x - y^2")),
        scalar_cochain(CHART, parse("x^2 - y", CHART)),
        conformal_cochain(g, parse("x^2 - y^2", CHART)),
    ):
        rep = d2_probe(ctx, theta, CFG)
        assert rep.passed, (theta.tag, rep.max_residual)


def test_connection_cochain_is_closed_exact(ctx):
    d = d_kv(ctx, connection_cochain(flat_connection(CHART)))
    rep = cochain_zero_probe_exact(d, ProbeConfig(samples=30, seed=5,
                                                  tolerance=1e-12))
    assert rep.max_residual == 0.0


def test_jacobi_admission(ctx):
    assert jacobi_probe(ctx, _vf("1 + x - 2*y", "3*y"), CFG).passed
    assert not jacobi_probe(ctx, _vf("x^2", "y"), CFG).passed
    with pytest.raises(KVError):
        vector_cochain(ctx, _vf("x^2", "y"))


def test_degree0_coboundary_is_bracket(ctx):
    Z = _vf("1 + x", "x - y")
    theta = vector_cochain(ctx, Z)
    d = d_kv(ctx, theta)
    rng = np.random.default_rng(12)
    Y = random_vector_field(CHART, rng)
    from kvcalc.fields import fields_equal_probe
    assert fields_equal_probe(d(Y), lie_bracket(Z, Y), CFG).passed


def test_context_rejects_curved_connection():
    half = Chart(("x", "y"), ((-2.0, 2.0), (0.5, 2.0)))
    g = MetricField.conformal_euclidean(half, parse("1/y^2", half))
    with pytest.raises(ContextError):
        KVContext.admitted(half, levi_civita(g), CFG)


def test_context_rejects_torsion():
    zero = parse("0", CHART)
    one = parse("1", CHART)
    gamma = (((zero, one), (zero, zero)), ((zero, zero), (zero, zero)))
    with pytest.raises(ContextError):
        KVContext.admitted(CHART, Connection(CHART, gamma), CFG)


def test_conformal_cochain_pointwise_value():
    # theta(X,Y) = X(f)Y + Y(f)X - g(X,Y) grad f; for f = (1/2)ln(x^2+y^2)
    # on Euclidean g at (1,0): theta(dx,dx) = 2 f_x dx - grad f = dx
    punctured = Chart(("x", "y"), ((-2.0, 2.0), (-2.0, 2.0)),
                      (parse("x^2 + y^2 - 1/100", CHART),))
    g = MetricField.euclidean(punctured)
    theta = conformal_cochain(g, parse("1/2*ln(x^2 + y^2)", punctured))
    e1, e2 = coordinate_fields(punctured)
    out = theta(e1, e1)
    pt = {"x": 1.0, "y": 0.0}
    assert evaluate(out.components[0], pt) == pytest.approx(1.0)
    assert evaluate(out.components[1], pt) == pytest.approx(0.0, abs=1e-15)
    # and the mixed slot: theta(dx,dy) at (1,0) = f_y dx + f_x dy - 0 = dy
    mixed = theta(e1, e2)
    assert evaluate(mixed.components[0], pt) == pytest.approx(0.0, abs=1e-15)
    assert evaluate(mixed.components[1], pt) == pytest.approx(1.0)


def test_dual_projective_pointwise_value():
    g = MetricField.euclidean(CHART)
    e1, e2 = coordinate_fields(CHART)
    theta = dual_projective_cochain(g.as_tensor(), e1)
    out = theta(e2, e2)  # -g(dy,dy) dx = -dx
    pt = {"x": 0.5, "y": 0.5}
    assert evaluate(out.components[0], pt) == pytest.approx(-1.0)
    assert evaluate(out.components[1], pt) == 0.0


def test_projective_cochain_symmetric():
    from kvcalc.fields import OneForm
    w = OneForm(CHART, (parse("y", CHART), parse("x^2", CHART)))
    theta = projective_cochain(w)
    rng = np.random.default_rng(14)
    X, Y = (random_vector_field(CHART, rng) for _ in range(2))
    from kvcalc.fields import fields_equal_probe
    assert fields_equal_probe(theta(X, Y), theta(Y, X), CFG).passed


def test_curvature_cochain_zero_iff_flat():
    assert cochain_zero_probe(
        curvature_cochain(flat_connection(CHART)), CFG).passed
    half = Chart(("x", "y"), ((-2.0, 2.0), (0.5, 2.0)))
    g = MetricField.conformal_euclidean(half, parse("1/y^2", half))
    rep = cochain_zero_probe(curvature_cochain(levi_civita(g)), CFG)
    assert not rep.passed


def test_conjugate_star_coboundary_matches_4R(ctx):
    # the quantitative heart of the conjugate-connection section on a
    # genuinely curved Hessian metric
    g = MetricField.from_potential(
        CHART, parse("exp(x) + exp(y) + exp(x + y)", CHART))
    star = conjugate(flat_connection(CHART), g)
    d_star = d_kv(ctx, connection_cochain(star))
    fourR = curvature_cochain(levi_civita(g), factor=4, swap=True)
    rep = cochains_equal_probe(d_star, fourR,
                               ProbeConfig(samples=60, seed=19,
                                           tolerance=1e-8))
    assert rep.passed, rep.max_residual


def test_cochain_arithmetic(ctx):
    a = ad_cochain(_vf("x", "y"))
    b = ad_cochain(_vf("y", "x"))
    rng = np.random.default_rng(16)
    X = random_vector_field(CHART, rng)
    from kvcalc.fields import fields_equal_probe
    assert fields_equal_probe((a + b)(X), a(X) + b(X), CFG).passed
    assert fields_equal_probe((a - b)(X), a(X) - b(X), CFG).passed
    assert fields_equal_probe(a.scaled(3)(X), a(X).scaled(3), CFG).passed


def test_cochain_memoizes_applications(ctx):
    theta = ad_cochain(_vf("x^2*y", "y^3"))
    d = d_kv(ctx, theta)
    e1, e2 = coordinate_fields(CHART)
    first = d(e1, e2)
    second = d(e1, e2)
    assert first is second


def test_degree_cap_enforced(ctx):
    g = MetricField.euclidean(CHART)
    theta = conformal_cochain(g, parse("x*y", CHART))
    d3 = d_kv(ctx, d_kv(ctx, theta))  # degree 4 would exceed the cap
    with pytest.raises(KVError):
        d_kv(ctx, d3)
