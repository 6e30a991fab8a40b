"""Cochains of vector-field arguments and their coboundary operator.

A degree-n cochain is an R-multilinear map taking n vector fields to a
vector field; degree 0 is a single vector field whose second covariant
derivative vanishes (admission is probed, not proven). The coboundary is

    (d theta)(X_1, ..., X_{n+1}) =
        sum_{i=1}^{n} (-1)^i [ (D_{X_i} theta)(X_1, ..., ^X_i, ..., X_{n+1})
                               + D_{theta(..., ^X_i, ..., X_i)} X_{n+1} ]

where ^X_i means slot i is removed, the second theta sees the first n
arguments with slot i removed and X_i appended, and D_X theta is the
covariant derivative of theta as a multilinear map. On degree 0 the
coboundary of Z is Y -> [Z, Y]. d o d = 0 is the central sampled invariant.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .chart import Chart
from .connection import (
    Connection,
    cov_deriv_vf,
    curvature_operator,
    flatness_probe,
    grad,
    torsion_probe,
)
from .expr import Expr, as_expr, mul, neg, sub
from .fields import (
    BilinearVVField,
    EqualityReport,
    FieldError,
    MetricField,
    OneForm,
    ProbeConfig,
    VectorField,
    coordinate_fields,
    lie_bracket,
    random_affine_vector_field,
    random_polynomial,
    random_vector_field,
    report_from_residuals,
    residual_arrays,
    vf_apply,
    zero_vector_field,
)

__all__ = [
    "KVError",
    "ContextError",
    "KVContext",
    "Cochain",
    "MAX_DEGREE",
    "identity_cochain",
    "scalar_cochain",
    "ad_cochain",
    "vector_cochain",
    "tensor_cochain",
    "projective_cochain",
    "dual_projective_cochain",
    "conformal_cochain",
    "connection_cochain",
    "conn_diff_cochain",
    "coboundary_candidate",
    "curvature_cochain",
    "nabla_cochain",
    "d_kv",
    "cochain_components",
    "cochain_zero_probe",
    "cochains_equal_probe",
    "cochain_zero_probe_exact",
    "cochains_equal_probe_exact",
    "d2_probe",
    "jacobi_probe",
    "symmetry_probe",
    "tensoriality_probe",
]

# coboundaries are evaluated operationally; each degree multiplies cost, and
# nothing in the verification suite needs degree-5 cochains
MAX_DEGREE = 4


class KVError(ValueError):
    """Cochain construction or arity error."""


class ContextError(KVError):
    """The ambient connection failed an admission probe."""


class Cochain:
    """R-multilinear vector-valued map of vector fields.

    Wraps an evaluator closure; results are memoized per argument tuple
    (by field value) because coboundary towers reuse subcalls heavily.
    """

    __slots__ = ("degree", "chart", "tag", "_fn", "_memo")

    def __init__(self, degree: int, chart: Chart, fn: Callable, tag: str):
        if degree < 0 or degree > MAX_DEGREE:
            raise KVError(f"degree {degree} outside 0..{MAX_DEGREE}")
        self.degree = degree
        self.chart = chart
        self.tag = tag
        self._fn = fn
        self._memo = {}

    def __call__(self, *args: VectorField) -> VectorField:
        if len(args) != self.degree:
            raise KVError(
                f"{self.tag} cochain of degree {self.degree} called with "
                f"{len(args)} arguments")
        for a in args:
            if a.chart != self.chart:
                raise KVError("argument field lives on a different chart")
        if not args:
            return self._fn()
        hit = self._memo.get(args)
        if hit is None:
            hit = self._fn(*args)
            self._memo[args] = hit
        return hit

    def __repr__(self):
        return f"Cochain(degree={self.degree}, tag={self.tag!r})"

    def __add__(self, other: "Cochain") -> "Cochain":
        if not isinstance(other, Cochain):
            return NotImplemented
        if other.degree != self.degree or other.chart != self.chart:
            raise KVError("cochain sum needs matching degree and chart")
        return Cochain(self.degree, self.chart,
                       lambda *a: self(*a) + other(*a),
                       f"({self.tag}+{other.tag})")

    def __sub__(self, other: "Cochain") -> "Cochain":
        if not isinstance(other, Cochain):
            return NotImplemented
        if other.degree != self.degree or other.chart != self.chart:
            raise KVError("cochain difference needs matching degree and chart")
        return Cochain(self.degree, self.chart,
                       lambda *a: self(*a) - other(*a),
                       f"({self.tag}-{other.tag})")

    def scaled(self, s) -> "Cochain":
        s = as_expr(s)
        return Cochain(self.degree, self.chart,
                       lambda *a: self(*a).scaled(s),
                       f"scale({self.tag})")


@dataclass(frozen=True)
class KVContext:
    """A chart with a flat torsion-free connection, probe-admitted.

    The algebra structure under verification is X * Y = D_X Y for this
    connection; admission runs the flatness and torsion probes unless
    check=False (the setup path reports their reports on failure).
    """

    chart: Chart
    connection: Connection
    cfg: ProbeConfig = ProbeConfig()

    def __post_init__(self):
        if self.connection.chart != self.chart:
            raise ContextError("connection lives on a different chart")

    @classmethod
    def admitted(cls, chart: Chart, connection: Connection,
                 cfg: ProbeConfig = ProbeConfig()) -> "KVContext":
        flatr = flatness_probe(connection, cfg)
        if not flatr.passed:
            raise ContextError(
                f"connection is not flat on samples: {flatr}")
        torr = torsion_probe(connection, cfg)
        if not torr.passed:
            raise ContextError(
                f"connection has torsion on samples: {torr}")
        return cls(chart, connection, cfg)


# ---------------------------------------------------------------------------
# constructors


def identity_cochain(chart: Chart) -> Cochain:
    return Cochain(1, chart, lambda X: X, "identity")


def scalar_cochain(chart: Chart, f: Expr) -> Cochain:
    """theta(Z) = f * Z."""
    return Cochain(1, chart, lambda Z: Z.scaled(f), "scalar")


def ad_cochain(Z: VectorField) -> Cochain:
    """theta(Y) = [Z, Y]."""
    return Cochain(1, Z.chart, lambda Y: lie_bracket(Z, Y), "ad")


def vector_cochain(ctx: KVContext, Z: VectorField,
                   check: bool = True) -> Cochain:
    """Degree-0 element; must satisfy D_X D_Y Z = D_{D_X Y} Z (probed)."""
    if check:
        rep = jacobi_probe(ctx, Z, ctx.cfg)
        if not rep.passed:
            raise KVError(
                f"field fails the second-covariant-derivative condition: {rep}")
    return Cochain(0, Z.chart, lambda: Z, "vector")


def tensor_cochain(T: BilinearVVField) -> Cochain:
    """theta(X, Y) = T(X, Y) for a pointwise-bilinear T."""
    return Cochain(2, T.chart, T.apply, "tensor")


def projective_cochain(omega: OneForm) -> Cochain:
    """theta(X, Y) = omega(X) Y + omega(Y) X."""

    def ev(X, Y):
        return Y.scaled(omega.apply(X)) + X.scaled(omega.apply(Y))

    return Cochain(2, omega.chart, ev, "projective")


def dual_projective_cochain(h, V: VectorField) -> Cochain:
    """theta(X, Y) = -h(X, Y) V."""

    def ev(X, Y):
        return V.scaled(neg(h.apply(X, Y)))

    return Cochain(2, V.chart, ev, "dual-projective")


def conformal_cochain(g: MetricField, f: Expr) -> Cochain:
    """theta(X, Y) = -g(X, Y) grad f + X(f) Y + Y(f) X."""
    gf = grad(f, g)

    def ev(X, Y):
        return (gf.scaled(neg(g.apply(X, Y)))
                + Y.scaled(vf_apply(X, f)) + X.scaled(vf_apply(Y, f)))

    return Cochain(2, g.chart, ev, "conformal")


def connection_cochain(c: Connection) -> Cochain:
    """The product map itself as a 2-cochain: (X, Y) -> D_X Y."""
    return Cochain(2, c.chart, lambda X, Y: cov_deriv_vf(c, X, Y), "product")


def conn_diff_cochain(ctx: KVContext, other: Connection) -> Cochain:
    """theta = D - D' as a (tensorial, symmetric if both torsion-free)
    2-cochain."""
    if other.chart != ctx.chart:
        raise KVError("connections live on different charts")

    def ev(X, Y):
        return cov_deriv_vf(ctx.connection, X, Y) - cov_deriv_vf(other, X, Y)

    return Cochain(2, ctx.chart, ev, "connection-difference")


def coboundary_candidate(ctx: KVContext, Z: VectorField) -> Cochain:
    """(X, Y) -> D_X D_Y Z - D_{D_X Y} Z, the explicit coboundary of ad_Z."""
    c = ctx.connection

    def ev(X, Y):
        return (cov_deriv_vf(c, X, cov_deriv_vf(c, Y, Z))
                - cov_deriv_vf(c, cov_deriv_vf(c, X, Y), Z))

    return Cochain(2, ctx.chart, ev, "coboundary-candidate")


def curvature_cochain(c: Connection, factor=1, swap: bool = False) -> Cochain:
    """(X, Y, Z) -> factor * R(X, Y) Z, optionally with X, Y swapped."""
    factor = as_expr(factor)

    def ev(X, Y, Z):
        if swap:
            X, Y = Y, X
        return curvature_operator(c, X, Y, Z).scaled(factor)

    return Cochain(3, c.chart, ev, "curvature")


# ---------------------------------------------------------------------------
# the differential


def nabla_cochain(ctx: KVContext, X: VectorField, theta: Cochain) -> Cochain:
    """Covariant derivative of a cochain as a multilinear map:

    (D_X theta)(Y_1..Y_n) = D_X(theta(Y_1..Y_n))
                            - sum_j theta(Y_1, ..., D_X Y_j, ..., Y_n)
    """
    if theta.degree == 0:
        raise KVError("covariant derivative of a degree-0 cochain is just "
                      "cov_deriv_vf; no cochain to build")
    c = ctx.connection

    def ev(*ys):
        out = cov_deriv_vf(c, X, theta(*ys))
        for j in range(len(ys)):
            shifted = ys[:j] + (cov_deriv_vf(c, X, ys[j]),) + ys[j + 1:]
            out = out - theta(*shifted)
        return out

    return Cochain(theta.degree, ctx.chart, ev, f"nabla({theta.tag})")


def d_kv(ctx: KVContext, theta: Cochain) -> Cochain:
    """The coboundary operator. Degree 0 maps Z to ad_Z; see module doc."""
    if theta.chart != ctx.chart:
        raise KVError("cochain lives on a different chart")
    if theta.degree == 0:
        Z = theta()
        return Cochain(1, ctx.chart, lambda Y: lie_bracket(Z, Y),
                       f"d({theta.tag})")
    if theta.degree + 1 > MAX_DEGREE:
        raise KVError(
            f"coboundary would exceed the degree cap {MAX_DEGREE}")
    n = theta.degree
    c = ctx.connection

    def ev(*xs):
        total = zero_vector_field(ctx.chart)
        last = xs[n]
        for i in range(1, n + 1):
            xi = xs[i - 1]
            rest = xs[:i - 1] + xs[i:]          # n args, slot i removed
            term = cov_deriv_vf(c, xi, theta(*rest))
            for j in range(n):
                shifted = rest[:j] + (cov_deriv_vf(c, xi, rest[j]),) + rest[j + 1:]
                term = term - theta(*shifted)
            head = xs[:i - 1] + xs[i:n] + (xi,)  # first n args, X_i to the end
            term = term + cov_deriv_vf(c, theta(*head), last)
            total = total - term if i % 2 else total + term
        return total

    return Cochain(n + 1, ctx.chart, ev, f"d({theta.tag})")


def cochain_components(theta: Cochain) -> BilinearVVField:
    """Evaluate a degree-2 cochain on coordinate pairs. Only meaningful when
    the cochain is pointwise-bilinear (tensorial); probe that first."""
    if theta.degree != 2:
        raise KVError("components extraction is for degree-2 cochains")
    dd = coordinate_fields(theta.chart)
    n = theta.chart.dim
    cols = [[theta(dd[i], dd[j]) for j in range(n)] for i in range(n)]
    return BilinearVVField(theta.chart, tuple(
        tuple(tuple(cols[i][j].components[k] for j in range(n))
              for i in range(n)) for k in range(n)))


# ---------------------------------------------------------------------------
# probes


def _tuple_residual_probe(chart: Chart, cfg: ProbeConfig, draw_pair) -> EqualityReport:
    """Aggregate residuals over cfg.tuples independent random-argument draws.

    draw_pair(rng) returns (left_field, right_field); the report keeps the
    per-point maximum across draws. Points are drawn first so field draws
    never shift the sample locations.
    """
    rng = cfg.rng()
    points = chart.sample(cfg.samples, rng)
    env = chart.env(points)
    agg = None
    for _ in range(max(1, cfg.tuples)):
        left, right = draw_pair(rng)
        res = residual_arrays(list(left.flat_components()),
                              list(right.flat_components()), env)
        agg = res if agg is None else np.maximum(agg, res)
    return report_from_residuals(points, agg, cfg.tolerance)


def _random_args(chart: Chart, rng: np.random.Generator, n: int,
                 affine_last: bool = False):
    out = []
    for k in range(n):
        if affine_last and k == n - 1:
            out.append(random_affine_vector_field(chart, rng))
        else:
            out.append(random_vector_field(chart, rng))
    return tuple(out)


def cochain_zero_probe(theta: Cochain,
                       cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    """Is theta the zero cochain, on random argument tuples?"""
    zero = zero_vector_field(theta.chart)

    def draw(rng):
        args = _random_args(theta.chart, rng, theta.degree)
        return theta(*args), zero

    return _tuple_residual_probe(theta.chart, cfg, draw)


def cochains_equal_probe(a: Cochain, b: Cochain,
                         cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    if a.degree != b.degree or a.chart != b.chart:
        raise KVError("cochain comparison needs matching degree and chart")

    def draw(rng):
        args = _random_args(a.chart, rng, a.degree)
        return a(*args), b(*args)

    return _tuple_residual_probe(a.chart, cfg, draw)


def d2_probe(ctx: KVContext, theta: Cochain,
             cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    """The central invariant: d(d(theta)) = 0 on random arguments."""
    return cochain_zero_probe(d_kv(ctx, d_kv(ctx, theta)), cfg)


# ---------------------------------------------------------------------------
# exact-arithmetic probes: for rational cochains on box charts, identities
# that float cancellation would blur (tolerances at or below 1e-12) are
# certified at rational lattice points instead


def _exact_lattice(chart: Chart, count: int, rng: np.random.Generator,
                   denominator: int = 8):
    """count strict-interior points with coordinates k/denominator."""
    from fractions import Fraction

    lo = np.array([int(np.ceil(b[0] * denominator)) + 1 for b in chart.box])
    hi = np.array([int(np.floor(b[1] * denominator)) - 1 for b in chart.box])
    pts = []
    budget = 200 * count
    while len(pts) < count and budget > 0:
        draw = rng.integers(lo, hi + 1, size=(count, chart.dim))
        budget -= count
        floats = draw / denominator
        keep = chart.contains(floats)
        for row in draw[keep]:
            pts.append(tuple(Fraction(int(v), denominator) for v in row))
            if len(pts) == count:
                break
    if len(pts) < count:
        raise KVError("could not place exact lattice points in the chart")
    return pts


def _exact_pair_probe(chart: Chart, cfg: ProbeConfig, draw_pair) -> EqualityReport:
    from .expr import evaluate_exact

    rng = cfg.rng()
    points = _exact_lattice(chart, cfg.samples, rng)
    names = chart.coords
    best = [0.0] * len(points)
    for _ in range(max(1, cfg.tuples)):
        left, right = draw_pair(rng)
        la, lb = left.flat_components(), right.flat_components()
        for pi, pt in enumerate(points):
            env = dict(zip(names, pt))
            mag = 0.0
            diff = 0.0
            for ca, cb in zip(la, lb):
                va = evaluate_exact(ca, env)
                vb = evaluate_exact(cb, env)
                diff = max(diff, abs(float(va - vb)))
                mag = max(mag, abs(float(va)), abs(float(vb)))
            best[pi] = max(best[pi], diff / (1.0 + mag))
    fpts = np.array([[float(c) for c in p] for p in points])
    return report_from_residuals(fpts, np.array(best), cfg.tolerance)


def cochain_zero_probe_exact(theta: Cochain,
                             cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    """Exact-arithmetic zero check; argument fields are polynomial, so a
    residual of 0.0 certifies the identity at every probed point."""
    zero = zero_vector_field(theta.chart)

    def draw(rng):
        args = _random_args(theta.chart, rng, theta.degree)
        return theta(*args), zero

    return _exact_pair_probe(theta.chart, cfg, draw)


def cochains_equal_probe_exact(a: Cochain, b: Cochain,
                               cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    if a.degree != b.degree or a.chart != b.chart:
        raise KVError("cochain comparison needs matching degree and chart")

    def draw(rng):
        args = _random_args(a.chart, rng, a.degree)
        return a(*args), b(*args)

    return _exact_pair_probe(a.chart, cfg, draw)


def jacobi_probe(ctx: KVContext, Z: VectorField,
                 cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    """Degree-0 admission: D_X D_Y Z = D_{D_X Y} Z on random X, Y."""
    c = ctx.connection
    zero = zero_vector_field(ctx.chart)

    def draw(rng):
        X, Y = _random_args(ctx.chart, rng, 2)
        lhs = (cov_deriv_vf(c, X, cov_deriv_vf(c, Y, Z))
               - cov_deriv_vf(c, cov_deriv_vf(c, X, Y), Z))
        return lhs, zero

    return _tuple_residual_probe(ctx.chart, cfg, draw)


def symmetry_probe(ctx: KVContext, theta: Cochain,
                   cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    """theta(X, Y) = theta(Y, X) on random pairs (degree 2)."""
    if theta.degree != 2:
        raise KVError("symmetry probe expects a degree-2 cochain")

    def draw(rng):
        X, Y = _random_args(ctx.chart, rng, 2)
        return theta(X, Y), theta(Y, X)

    return _tuple_residual_probe(ctx.chart, cfg, draw)


def tensoriality_probe(ctx: KVContext, theta: Cochain,
                       cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    """Function-linearity in every slot: theta(..., f X_s, ...) = f theta(...).

    Each draw rescales one slot by a random polynomial; the worst slot
    residual is reported.
    """
    if theta.degree < 1:
        raise KVError("tensoriality probe needs at least one argument slot")
    state = {"slot": 0}

    def draw(rng):
        s = state["slot"]
        state["slot"] = (s + 1) % theta.degree
        args = _random_args(ctx.chart, rng, theta.degree)
        f = random_polynomial(ctx.chart, rng, degree=2)
        scaled_args = args[:s] + (args[s].scaled(f),) + args[s + 1:]
        return theta(*scaled_args), theta(*args).scaled(f)

    return _tuple_residual_probe(ctx.chart, cfg, draw)
