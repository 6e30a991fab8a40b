"""Probe registry: named checks that assertions can invoke.

Every probe has signature (env, args, cfg) -> EqualityReport. Argument
values reference bindings by name; scalar-valued arguments accept either a
bound scalar name or an inline expression string. Misconfigured arguments
raise ScenarioSetupError, which the runner reports as a scenario setup
failure rather than an assertion verdict.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from typing import Callable, Mapping

import numpy as np

from ..chart import Chart, ChartError, SamplingError
from ..connection import (
    Connection,
    codazzi_probe,
    connections_equal_probe,
    cov_deriv_oneform,
    cov_deriv_tensor02,
    cov_deriv_vf,
    flatness_probe,
    connection_from_tensor,
    grad,
    hessian,
    laplacian,
    levi_civita,
    metric_compat_probe,
    torsion_probe,
)
from ..derham import (
    TwistedForm,
    curvature_identity_probe,
    d2_flat_probe,
    d_nabla,
    dnabla_apply,
    flat_decomposition_probe,
    form_consistency_probe,
    random_twisted_form,
    scalar_exterior_derivative,
    _incr_tuples,
)
from ..expr import DomainError, Expr, evaluate, to_string
from ..fields import (
    EqualityReport,
    MetricField,
    OneForm,
    ProbeConfig,
    TensorField02,
    VectorField,
    coordinate_fields,
    euler_field,
    fields_equal_probe,
    lie_bracket,
    random_vector_field,
    report_from_residuals,
    residual_arrays,
    vf_apply,
)
from ..kv import (
    Cochain,
    KVContext,
    cochain_components,
    cochain_zero_probe,
    cochain_zero_probe_exact,
    cochains_equal_probe,
    cochains_equal_probe_exact,
    d2_probe,
    d_kv,
    jacobi_probe,
    symmetry_probe,
    tensoriality_probe,
)
from ..parse import ParseError, parse

__all__ = ["ScenarioEnv", "ScenarioSetupError", "PROBES", "run_probe"]


class ScenarioSetupError(RuntimeError):
    """Scenario bindings or probe arguments could not be realized."""


@dataclass
class ScenarioEnv:
    """Live objects built from a scenario's declarative bindings."""

    chart: Chart
    cfg: ProbeConfig
    scalars: dict = dc_field(default_factory=dict)
    fields: dict = dc_field(default_factory=dict)
    oneforms: dict = dc_field(default_factory=dict)
    metrics: dict = dc_field(default_factory=dict)
    tensors: dict = dc_field(default_factory=dict)
    connections: dict = dc_field(default_factory=dict)
    cochains: dict = dc_field(default_factory=dict)
    forms: dict = dc_field(default_factory=dict)
    context: KVContext | None = None


def _need(args: Mapping, key: str):
    if key not in args:
        raise ScenarioSetupError(f"probe argument {key!r} is required")
    return args[key]


def _lookup(table: Mapping, name, what: str):
    if not isinstance(name, str) or name not in table:
        have = ", ".join(sorted(table)) or "none bound"
        raise ScenarioSetupError(f"unknown {what} {name!r} (bound: {have})")
    return table[name]


def _scalar_arg(env: ScenarioEnv, value) -> Expr:
    """A bound scalar name, or an inline expression string."""
    if isinstance(value, str) and value in env.scalars:
        return env.scalars[value]
    if isinstance(value, (int, float)):
        value = repr(value)
    try:
        return parse(str(value), env.chart)
    except ParseError as e:
        raise ScenarioSetupError(f"bad scalar argument: {e}") from None


def _field_arg(env: ScenarioEnv, args: Mapping, key: str = "field") -> VectorField:
    return _lookup(env.fields, _need(args, key), "vector field")


def _metric_arg(env: ScenarioEnv, args: Mapping, key: str = "metric") -> MetricField:
    return _lookup(env.metrics, _need(args, key), "metric")


def _conn_arg(env: ScenarioEnv, args: Mapping, key: str = "connection") -> Connection:
    return _lookup(env.connections, _need(args, key), "connection")


def _cochain_arg(env: ScenarioEnv, args: Mapping, key: str = "cochain") -> Cochain:
    return _lookup(env.cochains, _need(args, key), "cochain")


def _form_arg(env: ScenarioEnv, args: Mapping, key: str = "form") -> TwistedForm:
    return _lookup(env.forms, _need(args, key), "twisted form")


def _sym_arg(env: ScenarioEnv, args: Mapping, key: str):
    """A metric or plain 0-2 tensor binding."""
    name = _need(args, key)
    if isinstance(name, str):
        if name in env.metrics:
            return env.metrics[name]
        if name in env.tensors:
            return env.tensors[name]
    raise ScenarioSetupError(f"unknown metric/tensor {name!r}")


def _ctx(env: ScenarioEnv) -> KVContext:
    if env.context is None:
        raise ScenarioSetupError(
            "this probe needs the scenario to declare [context] with a "
            "flat torsion-free connection")
    return env.context


def _comps_probe(chart: Chart, left, right, cfg: ProbeConfig) -> EqualityReport:
    pts = chart.sample(cfg.samples, cfg.rng())
    res = residual_arrays(list(left), list(right), chart.env(pts))
    return report_from_residuals(pts, res, cfg.tolerance)


def _scalar_tuple_probe(chart: Chart, cfg: ProbeConfig, draw) -> EqualityReport:
    """Aggregate scalar-expression residuals over cfg.tuples random draws."""
    rng = cfg.rng()
    points = chart.sample(cfg.samples, rng)
    env = chart.env(points)
    agg = None
    for _ in range(max(1, cfg.tuples)):
        left, right = draw(rng)
        res = residual_arrays([left], [right], env)
        agg = res if agg is None else np.maximum(agg, res)
    return report_from_residuals(points, agg, cfg.tolerance)


# ---------------------------------------------------------------------------
# scalar and field probes


def _p_scalar_equal(env, args, cfg):
    left = _scalar_arg(env, _need(args, "left"))
    right = _scalar_arg(env, _need(args, "right"))
    return _comps_probe(env.chart, [left], [right], cfg)


def _p_fields_equal(env, args, cfg):
    left = _field_arg(env, args, "left")
    if "right_components" in args:
        right = VectorField(env.chart, tuple(
            parse(str(c), env.chart) for c in args["right_components"]))
    else:
        right = _field_arg(env, args, "right")
    return fields_equal_probe(left, right, cfg)


def _p_grad_equal(env, args, cfg):
    f = _scalar_arg(env, _need(args, "scalar"))
    g = _metric_arg(env, args)
    want = VectorField(env.chart, tuple(
        parse(str(c), env.chart) for c in _need(args, "components")))
    return fields_equal_probe(grad(f, g), want, cfg)


def _p_laplacian_equal(env, args, cfg):
    f = _scalar_arg(env, _need(args, "scalar"))
    g = _metric_arg(env, args)
    value = _scalar_arg(env, args.get("value", "0"))
    return _comps_probe(env.chart, [laplacian(f, g)], [value], cfg)


# ---------------------------------------------------------------------------
# connection probes


def _p_connection_flat(env, args, cfg):
    return flatness_probe(_conn_arg(env, args), cfg)


def _p_connection_torsion_free(env, args, cfg):
    return torsion_probe(_conn_arg(env, args), cfg)


def _p_connections_equal(env, args, cfg):
    return connections_equal_probe(
        _lookup(env.connections, _need(args, "left"), "connection"),
        _lookup(env.connections, _need(args, "right"), "connection"), cfg)


def _p_metric_compatible(env, args, cfg):
    return metric_compat_probe(_conn_arg(env, args), _metric_arg(env, args), cfg)


def _p_codazzi(env, args, cfg):
    h = _sym_arg(env, args, "tensor")
    return codazzi_probe(h, _conn_arg(env, args), cfg)


def _p_conjugate_identity(env, args, cfg):
    """Z g(X,Y) = g(D_Z X, Y) + g(X, D*_Z Y) on random triples."""
    c = _conn_arg(env, args)
    cstar = _lookup(env.connections, _need(args, "conjugate"), "connection")
    g = _metric_arg(env, args)

    def draw(rng):
        X, Y, Z = (random_vector_field(env.chart, rng) for _ in range(3))
        lhs = vf_apply(Z, g.apply(X, Y))
        rhs = (g.apply(cov_deriv_vf(c, Z, X), Y)
               + g.apply(X, cov_deriv_vf(cstar, Z, Y)))
        return lhs, rhs

    return _scalar_tuple_probe(env.chart, cfg, draw)


def _p_conjugate_involution(env, args, cfg):
    from ..connection import conjugate

    c = _conn_arg(env, args)
    g = _metric_arg(env, args)
    return connections_equal_probe(conjugate(conjugate(c, g), g), c, cfg)


def _p_midpoint_levi_civita(env, args, cfg):
    from ..connection import average, conjugate

    c = _conn_arg(env, args)
    g = _metric_arg(env, args)
    mid = average(c, conjugate(c, g))
    return connections_equal_probe(mid, levi_civita(g), cfg)


def _p_parallel_field(env, args, cfg):
    V = _field_arg(env, args)
    c = _conn_arg(env, args)
    n = env.chart.dim
    names = env.chart.coords
    comps = []
    for i in range(n):
        for k in range(n):
            terms = [V.components[k].diff(names[i])]
            terms += [c.gamma[k][i][j] * V.components[j] for j in range(n)]
            comps.append(sum(terms[1:], terms[0]))
    zero = [parse("0", env.chart)] * len(comps)
    return _comps_probe(env.chart, comps, zero, cfg)


def _p_deformed_flat(env, args, cfg):
    ctx = _ctx(env)
    theta = _cochain_arg(env, args)
    deformed = connection_from_tensor(ctx.connection, cochain_components(theta))
    return flatness_probe(deformed, cfg)


def _p_deformed_is_lc_conformal(env, args, cfg):
    """ambient + theta equals the Levi-Civita connection of e^{2f} g."""
    from ..expr import exp_, mul as emul

    ctx = _ctx(env)
    g = _metric_arg(env, args)
    f = _scalar_arg(env, _need(args, "scalar"))
    theta = _cochain_arg(env, args)
    factor = exp_(emul(2, f))
    scaled = MetricField(env.chart, tuple(
        tuple(emul(factor, e) for e in row) for row in g.rows))
    deformed = connection_from_tensor(ctx.connection, cochain_components(theta))
    return connections_equal_probe(levi_civita(scaled), deformed, cfg)


# ---------------------------------------------------------------------------
# cochain probes


def _p_kv_zero(env, args, cfg):
    return cochain_zero_probe(_cochain_arg(env, args), cfg)


def _p_kv_d_zero(env, args, cfg):
    ctx = _ctx(env)
    theta = d_kv(ctx, _cochain_arg(env, args))
    if args.get("exact"):
        return cochain_zero_probe_exact(theta, cfg)
    return cochain_zero_probe(theta, cfg)


def _p_kv_d2_zero(env, args, cfg):
    return d2_probe(_ctx(env), _cochain_arg(env, args), cfg)


def _p_kv_equal(env, args, cfg):
    return cochains_equal_probe(
        _lookup(env.cochains, _need(args, "left"), "cochain"),
        _lookup(env.cochains, _need(args, "right"), "cochain"), cfg)


def _p_kv_d_equal(env, args, cfg):
    ctx = _ctx(env)
    dtheta = d_kv(ctx, _cochain_arg(env, args))
    target = _lookup(env.cochains, _need(args, "target"), "cochain")
    if args.get("exact"):
        return cochains_equal_probe_exact(dtheta, target, cfg)
    return cochains_equal_probe(dtheta, target, cfg)


def _p_kv_symmetric(env, args, cfg):
    theta = _cochain_arg(env, args)
    if args.get("of_differential"):
        theta = d_kv(_ctx(env), theta)
    return symmetry_probe(_ctx(env), theta, cfg)


def _p_kv_tensorial(env, args, cfg):
    theta = _cochain_arg(env, args)
    if args.get("of_differential"):
        theta = d_kv(_ctx(env), theta)
    return tensoriality_probe(_ctx(env), theta, cfg)


def _p_kv_jacobi(env, args, cfg):
    return jacobi_probe(_ctx(env), _field_arg(env, args), cfg)


def _p_kv_antisym_bracket(env, args, cfg):
    """theta(X,Y) - theta(Y,X) = [Y,X] for theta the coboundary of the
    identity cochain (or any binding given here)."""
    ctx = _ctx(env)
    theta = _cochain_arg(env, args)
    if args.get("of_differential"):
        theta = d_kv(ctx, theta)
    anti = Cochain(2, env.chart, lambda X, Y: theta(X, Y) - theta(Y, X),
                   "antisym")
    rev = Cochain(2, env.chart, lambda X, Y: lie_bracket(Y, X), "rev-bracket")
    return cochains_equal_probe(anti, rev, cfg)


def _p_nabla_formula_projective(env, args, cfg):
    """(D_X theta)(Y,Z) = (D_X w)(Y) Z + (D_X w)(Z) Y for the symmetrized
    1-form cochain."""
    from ..kv import nabla_cochain, projective_cochain

    ctx = _ctx(env)
    w = _lookup(env.oneforms, _need(args, "oneform"), "one-form")
    theta = projective_cochain(w)

    def draw(rng):
        X, Y, Z = (random_vector_field(env.chart, rng) for _ in range(3))
        lhs = nabla_cochain(ctx, X, theta)(Y, Z)
        dw = cov_deriv_oneform(ctx.connection, X, w)
        rhs = Z.scaled(dw.apply(Y)) + Y.scaled(dw.apply(Z))
        return lhs, rhs

    return _fields_tuple_probe(env.chart, cfg, draw)


def _p_nabla_formula_dual_projective(env, args, cfg):
    """(D_X theta)(Y,Z) = -(D_X h)(Y,Z) V when V is parallel."""
    from ..kv import dual_projective_cochain, nabla_cochain

    ctx = _ctx(env)
    h = _sym_arg(env, args, "tensor")
    V = _field_arg(env, args)
    theta = dual_projective_cochain(h, V)

    def draw(rng):
        X, Y, Z = (random_vector_field(env.chart, rng) for _ in range(3))
        lhs = nabla_cochain(ctx, X, theta)(Y, Z)
        dh = cov_deriv_tensor02(ctx.connection, X, h)
        rhs = V.scaled(-dh.apply(Y, Z))
        return lhs, rhs

    return _fields_tuple_probe(env.chart, cfg, draw)


def _fields_tuple_probe(chart: Chart, cfg: ProbeConfig, draw) -> EqualityReport:
    rng = cfg.rng()
    points = chart.sample(cfg.samples, rng)
    penv = chart.env(points)
    agg = None
    for _ in range(max(1, cfg.tuples)):
        left, right = draw(rng)
        res = residual_arrays(list(left.flat_components()),
                              list(right.flat_components()), penv)
        agg = res if agg is None else np.maximum(agg, res)
    return report_from_residuals(points, agg, cfg.tolerance)


def _p_kv_component_identity(env, args, cfg):
    """Frame-component identities of a degree-3 coboundary against the
    Laplacian of the driving scalar, in the coordinate frame.

    pattern picks the slot/pairing layout; sign 0 means the target is the
    zero function instead of +-laplacian.
    """
    ctx = _ctx(env)
    theta = _cochain_arg(env, args)
    if args.get("of_differential", True):
        theta = d_kv(ctx, theta)
    g = _metric_arg(env, args)
    f = _scalar_arg(env, _need(args, "scalar"))
    pattern = args.get("pattern", "ijji")
    sign = int(args.get("sign", 1))
    dd = coordinate_fields(env.chart)
    e1, e2 = dd[0], dd[1]
    layouts = {
        "ijji": ((e1, e2, e2), e1),
        "ijij": ((e1, e2, e1), e2),
        "ijii": ((e1, e2, e1), e1),
        "ijjj": ((e1, e2, e2), e2),
    }
    if pattern not in layouts:
        raise ScenarioSetupError(f"unknown pattern {pattern!r}")
    slots, pair = layouts[pattern]
    val = g.apply(theta(*slots), pair)
    if sign == 0:
        target = parse("0", env.chart)
    else:
        lap = laplacian(f, g)
        target = lap if sign > 0 else -lap
    return _comps_probe(env.chart, [val], [target], cfg)


def _p_kv_d_scalar_formula(env, args, cfg):
    """d of the multiply-by-f endomorphism against its displayed forms:
    the three-term expansion and the collapsed -D_X(fY)."""
    from ..kv import scalar_cochain

    ctx = _ctx(env)
    f = _scalar_arg(env, _need(args, "scalar"))
    dtheta = d_kv(ctx, scalar_cochain(env.chart, f))
    c = ctx.connection
    form = args.get("form", "short")

    def draw(rng):
        X, Y = (random_vector_field(env.chart, rng) for _ in range(2))
        fY = Y.scaled(f)
        short = -cov_deriv_vf(c, X, fY)
        if form == "short":
            rhs = short
        elif form == "long":
            rhs = (short + cov_deriv_vf(c, X, Y).scaled(f)
                   - cov_deriv_vf(c, X.scaled(f), Y))
        else:
            raise ScenarioSetupError(f"form must be short/long, not {form!r}")
        return dtheta(X, Y), rhs

    return _fields_tuple_probe(env.chart, cfg, draw)


def _p_kv_d_conn_diff_formula(env, args, cfg):
    """For symmetric tensorial theta, d theta collapses to the two
    covariant-derivative terms (the directional-difference display)."""
    from ..kv import nabla_cochain

    ctx = _ctx(env)
    theta = _cochain_arg(env, args)
    dtheta = d_kv(ctx, theta)

    def draw(rng):
        X, Y, Z = (random_vector_field(env.chart, rng) for _ in range(3))
        rhs = nabla_cochain(ctx, Y, theta)(X, Z) \
            - nabla_cochain(ctx, X, theta)(Y, Z)
        return dtheta(X, Y, Z), rhs

    return _fields_tuple_probe(env.chart, cfg, draw)


def _p_kv_theta_quadratic(env, args, cfg):
    """d theta (X,Y,Z) = theta(X, theta(Y,Z)) - theta(Y, theta(X,Z)) when
    both the ambient connection and ambient + theta are flat.

    Derivation: expand the curvature of ambient + theta with the commutator
    convention and set both curvatures to zero; the covariant-derivative
    terms are exactly d theta and the quadratic terms remain.
    """
    ctx = _ctx(env)
    theta = _cochain_arg(env, args)
    dtheta = d_kv(ctx, theta)

    def draw(rng):
        X, Y, Z = (random_vector_field(env.chart, rng) for _ in range(3))
        rhs = theta(X, theta(Y, Z)) - theta(Y, theta(X, Z))
        return dtheta(X, Y, Z), rhs

    return _fields_tuple_probe(env.chart, cfg, draw)


def _p_kv_d_projective_formula(env, args, cfg):
    """d of the symmetrized one-form cochain against its expanded display
    in terms of the covariant derivative of the form."""
    from ..kv import projective_cochain

    ctx = _ctx(env)
    w = _lookup(env.oneforms, _need(args, "oneform"), "one-form")
    dtheta = d_kv(ctx, projective_cochain(w))
    c = ctx.connection

    def draw(rng):
        X, Y, Z = (random_vector_field(env.chart, rng) for _ in range(3))
        dwY = cov_deriv_oneform(c, Y, w)
        dwX = cov_deriv_oneform(c, X, w)
        rhs = (Z.scaled(dwY.apply(X)) + X.scaled(dwY.apply(Z))
               - Z.scaled(dwX.apply(Y)) - Y.scaled(dwX.apply(Z)))
        return dtheta(X, Y, Z), rhs

    return _fields_tuple_probe(env.chart, cfg, draw)


def _p_pointwise_value(env, args, cfg):
    """Evaluate a cochain on named fields at one point against expected
    component expressions."""
    theta = _cochain_arg(env, args)
    names = _need(args, "arguments")
    fields = tuple(_lookup(env.fields, nm, "vector field") for nm in names)
    point = env.chart.point(_need(args, "point"))
    out = theta(*fields)
    expected = [_scalar_arg(env, c) for c in _need(args, "expected")]
    got = [evaluate(c, point) for c in out.components]
    want = [evaluate(c, point) for c in expected]
    diff = max(abs(a - b) for a, b in zip(got, want))
    mag = max([abs(v) for v in got + want], default=0.0)
    res = diff / (1.0 + mag)
    pts = np.array([[point[c] for c in env.chart.coords]])
    return report_from_residuals(pts, np.array([res]), cfg.tolerance)


# ---------------------------------------------------------------------------
# twisted-form probes


def _derham_conn(env, args) -> Connection:
    return _conn_arg(env, args)


def _p_dnabla_d2_flat(env, args, cfg):
    return d2_flat_probe(_derham_conn(env, args), _form_arg(env, args), cfg)


def _p_dnabla_consistency(env, args, cfg):
    return form_consistency_probe(_derham_conn(env, args),
                                  _form_arg(env, args), cfg)


def _p_dnabla_degree1_display(env, args, cfg):
    """d theta (X,Y) = D_X theta(Y) - D_Y theta(X) - theta([X,Y])."""
    c = _derham_conn(env, args)
    theta = _form_arg(env, args)
    if theta.degree != 1:
        raise ScenarioSetupError("display probe wants a degree-1 form")

    def draw(rng):
        X, Y = (random_vector_field(env.chart, rng) for _ in range(2))
        lhs = dnabla_apply(c, theta, [X, Y])
        rhs = (cov_deriv_vf(c, X, theta.evaluate(Y))
               - cov_deriv_vf(c, Y, theta.evaluate(X))
               - theta.evaluate(lie_bracket(X, Y)))
        return lhs, rhs

    return _fields_tuple_probe(env.chart, cfg, draw)


def _p_dnabla_degree0_display(env, args, cfg):
    """d s (X) = D_X s for a twisted 0-form."""
    c = _derham_conn(env, args)
    s = _form_arg(env, args)
    if s.degree != 0:
        raise ScenarioSetupError("display probe wants a degree-0 form")
    val = s.evaluate()

    def draw(rng):
        X = random_vector_field(env.chart, rng)
        return d_nabla(c, s).evaluate(X), cov_deriv_vf(c, X, val)

    return _fields_tuple_probe(env.chart, cfg, draw)


def _p_dnabla_antisymmetry(env, args, cfg):
    """Swapping two arguments of d theta flips the sign."""
    c = _derham_conn(env, args)
    dtheta = d_nabla(_derham_conn(env, args), _form_arg(env, args))
    if dtheta.degree < 2:
        raise ScenarioSetupError("antisymmetry probe wants degree >= 2 output")

    def draw(rng):
        fields = [random_vector_field(env.chart, rng)
                  for _ in range(dtheta.degree)]
        swapped = [fields[1], fields[0]] + fields[2:]
        lhs = dtheta.evaluate(*fields)
        rhs = -dtheta.evaluate(*swapped)
        return lhs, rhs

    return _fields_tuple_probe(env.chart, cfg, draw)


def _p_dnabla_flat_decomposition(env, args, cfg):
    return flat_decomposition_probe(_derham_conn(env, args),
                                    _form_arg(env, args), cfg)


def _p_scalar_form_closed(env, args, cfg):
    """Ordinary exterior derivative of given scalar components vanishes."""
    degree = int(_need(args, "degree"))
    comps_in = [parse(str(c), env.chart) for c in _need(args, "components")]
    idxs = _incr_tuples(env.chart.dim, degree)
    if len(comps_in) != len(idxs):
        raise ScenarioSetupError(
            f"degree-{degree} scalar form needs {len(idxs)} components")
    table = dict(zip(idxs, comps_in))
    out = scalar_exterior_derivative(env.chart, degree, table)
    comps = [out[j] for j in _incr_tuples(env.chart.dim, degree + 1)]
    zero = [parse("0", env.chart)] * len(comps)
    return _comps_probe(env.chart, comps, zero, cfg)


def _p_curvature_identity_halfplane(env, args, cfg):
    """Self-contained: hyperbolic upper half-plane metric, Levi-Civita
    connection, d(d s) = R wedge s for a random twisted 0-form."""
    hp = Chart(("x", "y"), ((-2.0, 2.0), (0.5, 2.0)))
    g = MetricField.conformal_euclidean(hp, parse("1/y^2", hp))
    lc = levi_civita(g)
    rng = cfg.rng()
    s = random_twisted_form(hp, rng, 0,
                            poly_degree=int(args.get("poly_degree", 2)))
    return curvature_identity_probe(lc, s, cfg)


def _p_curvature_identity(env, args, cfg):
    """d(d theta) = R wedge theta for a bound form and connection."""
    return curvature_identity_probe(_derham_conn(env, args),
                                    _form_arg(env, args), cfg)


# ---------------------------------------------------------------------------
# commuting-field probes


def _p_bracket_coordinates_zero(env, args, cfg):
    X = _field_arg(env, args)
    comps = []
    for dj in coordinate_fields(env.chart):
        comps.extend(lie_bracket(X, dj).components)
    zero = [parse("0", env.chart)] * len(comps)
    return _comps_probe(env.chart, comps, zero, cfg)


def _p_bracket_euler_zero(env, args, cfg):
    X = _field_arg(env, args)
    comps = lie_bracket(X, euler_field(env.chart)).components
    zero = [parse("0", env.chart)] * len(comps)
    return _comps_probe(env.chart, list(comps), zero, cfg)


def _p_field_zero(env, args, cfg):
    X = _field_arg(env, args)
    zero = [parse("0", env.chart)] * len(X.components)
    return _comps_probe(env.chart, list(X.components), zero, cfg)


# ---------------------------------------------------------------------------
# branch-chart probes for the curvature-obstruction system


def _obstruction_u(chart: Chart, shift):
    u = parse("x/2*ln(x^2 + y^2) + y*atan(x/y)", chart)
    if shift:
        a, b, c = (float(v) for v in shift)
        u = u + parse(f"{a!r}*x + {b!r}*y + {c!r}", chart)
    return u


def _p_hessian_system(env, args, cfg):
    """(x^2+y^2) Hess(u) = [[x, y], [y, -x]] on one y-halfplane branch.

    Sign convention: the right-hand side is the coboundary-candidate
    matrix [[x, y], [y, -x]]; the displayed candidate solves the system
    with this orientation.
    """
    branch = args.get("branch", "upper")
    if branch == "upper":
        box = ((-2.0, 2.0), (0.01, 2.0))
    elif branch == "lower":
        box = ((-2.0, 2.0), (-2.0, -0.01))
    else:
        raise ScenarioSetupError(f"branch must be upper/lower, not {branch!r}")
    ch = Chart(("x", "y"), box)
    u = _obstruction_u(ch, args.get("shift"))
    r2 = parse("x^2 + y^2", ch)
    ux = u.diff("x")
    uy = u.diff("y")
    lhs = [r2 * ux.diff("x"), r2 * ux.diff("y"),
           r2 * uy.diff("x"), r2 * uy.diff("y")]
    rhs = [parse(s, ch) for s in ("x", "y", "y", "-x")]
    pts = ch.sample(cfg.samples, cfg.rng())
    res = residual_arrays(lhs, rhs, ch.env(pts))
    return report_from_residuals(pts, res, cfg.tolerance)


def _one_sided_jump(shift) -> float:
    """Jump of u_y across y = 0 along x = 2, by Richardson-extrapolated
    one-sided limits. The evaluation points sit off the slit, so the
    expression itself is defined; no chart membership is involved."""
    ch = Chart(("x", "y"), ((-3.0, 3.0), (-3.0, 3.0)))
    uy = _obstruction_u(ch, shift).diff("y")

    def limit(side: float) -> float:
        v5 = evaluate(uy, {"x": 2.0, "y": side * 1e-5})
        v6 = evaluate(uy, {"x": 2.0, "y": side * 1e-6})
        return (10.0 * v6 - v5) / 9.0

    return limit(+1.0) - limit(-1.0)


def _p_jump_pi(env, args, cfg):
    jump = _one_sided_jump(args.get("shift"))
    res = abs(jump - float(np.pi))
    pts = np.array([[2.0, 0.0]])
    return report_from_residuals(pts, np.array([res]), cfg.tolerance)


def _p_non_extendable(env, args, cfg):
    """Verdict probe: the one-sided limits of u_y disagree, so no continuous
    extension across the slit exists; residual 0 iff the jump is witnessed."""
    jump = _one_sided_jump(args.get("shift"))
    threshold = float(args.get("threshold", 0.1))
    res = 0.0 if abs(jump) >= threshold else 1.0
    pts = np.array([[2.0, 0.0]])
    return report_from_residuals(pts, np.array([res]), cfg.tolerance)


PROBES: dict = {
    "scalar_equal": _p_scalar_equal,
    "fields_equal": _p_fields_equal,
    "grad_equal": _p_grad_equal,
    "laplacian_equal": _p_laplacian_equal,
    "connection_flat": _p_connection_flat,
    "connection_torsion_free": _p_connection_torsion_free,
    "connections_equal": _p_connections_equal,
    "metric_compatible": _p_metric_compatible,
    "codazzi": _p_codazzi,
    "conjugate_identity": _p_conjugate_identity,
    "conjugate_involution": _p_conjugate_involution,
    "midpoint_levi_civita": _p_midpoint_levi_civita,
    "parallel_field": _p_parallel_field,
    "deformed_flat": _p_deformed_flat,
    "deformed_is_lc_conformal": _p_deformed_is_lc_conformal,
    "kv_zero": _p_kv_zero,
    "kv_d_zero": _p_kv_d_zero,
    "kv_d2_zero": _p_kv_d2_zero,
    "kv_equal": _p_kv_equal,
    "kv_d_equal": _p_kv_d_equal,
    "kv_symmetric": _p_kv_symmetric,
    "kv_tensorial": _p_kv_tensorial,
    "kv_jacobi": _p_kv_jacobi,
    "kv_antisym_bracket": _p_kv_antisym_bracket,
    "nabla_formula_projective": _p_nabla_formula_projective,
    "nabla_formula_dual_projective": _p_nabla_formula_dual_projective,
    "kv_component_identity": _p_kv_component_identity,
    "kv_d_scalar_formula": _p_kv_d_scalar_formula,
    "kv_d_conn_diff_formula": _p_kv_d_conn_diff_formula,
    "kv_theta_quadratic": _p_kv_theta_quadratic,
    "kv_d_projective_formula": _p_kv_d_projective_formula,
    "pointwise_value": _p_pointwise_value,
    "dnabla_d2_flat": _p_dnabla_d2_flat,
    "dnabla_consistency": _p_dnabla_consistency,
    "dnabla_degree1_display": _p_dnabla_degree1_display,
    "dnabla_degree0_display": _p_dnabla_degree0_display,
    "dnabla_antisymmetry": _p_dnabla_antisymmetry,
    "dnabla_flat_decomposition": _p_dnabla_flat_decomposition,
    "scalar_form_closed": _p_scalar_form_closed,
    "curvature_identity": _p_curvature_identity,
    "curvature_identity_halfplane": _p_curvature_identity_halfplane,
    "bracket_coordinates_zero": _p_bracket_coordinates_zero,
    "bracket_euler_zero": _p_bracket_euler_zero,
    "field_zero": _p_field_zero,
    "hessian_system": _p_hessian_system,
    "jump_pi": _p_jump_pi,
    "non_extendable": _p_non_extendable,
}


def run_probe(name: str, env: ScenarioEnv, args: Mapping,
              cfg: ProbeConfig) -> EqualityReport:
    fn = PROBES.get(name)
    if fn is None:
        known = ", ".join(sorted(PROBES))
        raise ScenarioSetupError(f"unknown probe {name!r} (known: {known})")
    try:
        return fn(env, args, cfg)
    except (ChartError, SamplingError, ParseError, DomainError) as e:
        raise ScenarioSetupError(f"probe {name}: {e}") from e
