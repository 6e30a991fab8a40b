"""Symbolic tensor fields on a chart, sampled equality probes, random fields.

All field types are immutable value objects: a chart plus component
expressions in the coordinate frame. Equality of fields is decided by
sampled residuals, never by symbolic normalization; the residual at a point
is the largest componentwise deviation scaled by 1/(1 + magnitude), so it is
absolute near zero and relative for large values.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .chart import Chart
from .expr import (
    Expr,
    Num,
    Var,
    ZERO,
    ONE,
    add,
    as_expr,
    div,
    evaluate_many_multi,
    mul,
    neg,
    pow_,
    sub,
)

__all__ = [
    "FieldError",
    "VectorField",
    "OneForm",
    "TensorField02",
    "MetricField",
    "BilinearVVField",
    "ProbeConfig",
    "EqualityReport",
    "vf_apply",
    "lie_bracket",
    "coordinate_fields",
    "euler_field",
    "zero_vector_field",
    "sharp",
    "flat",
    "metric_inverse_rows",
    "metric_det",
    "fields_equal_probe",
    "field_zero_probe",
    "residual_arrays",
    "report_from_residuals",
    "random_polynomial",
    "random_vector_field",
    "random_affine_vector_field",
    "random_oneform",
    "random_tensor12",
]


class FieldError(ValueError):
    """Field construction or chart mismatch error."""


def _as_tuple(comps: Iterable) -> tuple:
    return tuple(as_expr(c) for c in comps)


def _check_same_chart(a, b):
    if a.chart != b.chart:
        raise FieldError("fields live on different charts")


@dataclass(frozen=True)
class VectorField:
    """Contravariant components X^i in the coordinate frame."""

    chart: Chart
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", _as_tuple(self.components))
        if len(self.components) != self.chart.dim:
            raise FieldError(
                f"need {self.chart.dim} components, got {len(self.components)}")

    def apply(self, f: Expr) -> Expr:
        return vf_apply(self, f)

    def __add__(self, other: "VectorField") -> "VectorField":
        _check_same_chart(self, other)
        return VectorField(self.chart, tuple(
            add(a, b) for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        _check_same_chart(self, other)
        return VectorField(self.chart, tuple(
            sub(a, b) for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "VectorField":
        return VectorField(self.chart, tuple(neg(c) for c in self.components))

    def scaled(self, s) -> "VectorField":
        s = as_expr(s)
        return VectorField(self.chart, tuple(mul(s, c) for c in self.components))

    def flat_components(self) -> tuple:
        return self.components


@dataclass(frozen=True)
class OneForm:
    """Covariant components omega_i in the coordinate frame."""

    chart: Chart
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", _as_tuple(self.components))
        if len(self.components) != self.chart.dim:
            raise FieldError(
                f"need {self.chart.dim} components, got {len(self.components)}")

    def apply(self, X: VectorField) -> Expr:
        _check_same_chart(self, X)
        return add(*[mul(w, x) for w, x in zip(self.components, X.components)])

    def flat_components(self) -> tuple:
        return self.components


def _square_rows(rows, dim: int) -> tuple:
    out = tuple(_as_tuple(r) for r in rows)
    if len(out) != dim or any(len(r) != dim for r in out):
        raise FieldError(f"need a {dim}x{dim} component matrix")
    return out


@dataclass(frozen=True)
class TensorField02(object):
    """Twice-covariant components h_{ij}; no symmetry assumed."""

    chart: Chart
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", _square_rows(self.rows, self.chart.dim))

    def entry(self, i: int, j: int) -> Expr:
        return self.rows[i][j]

    def apply(self, X: VectorField, Y: VectorField) -> Expr:
        _check_same_chart(self, X)
        _check_same_chart(self, Y)
        return add(*[mul(self.rows[i][j], X.components[i], Y.components[j])
                     for i in range(self.chart.dim)
                     for j in range(self.chart.dim)])

    def __add__(self, other: "TensorField02") -> "TensorField02":
        _check_same_chart(self, other)
        return TensorField02(self.chart, tuple(
            tuple(add(a, b) for a, b in zip(ra, rb))
            for ra, rb in zip(self.rows, other.rows)))

    def __sub__(self, other: "TensorField02") -> "TensorField02":
        _check_same_chart(self, other)
        return TensorField02(self.chart, tuple(
            tuple(sub(a, b) for a, b in zip(ra, rb))
            for ra, rb in zip(self.rows, other.rows)))

    def flat_components(self) -> tuple:
        return tuple(e for r in self.rows for e in r)


@dataclass(frozen=True)
class MetricField:
    """Symmetric twice-covariant field used as a (pseudo-)metric.

    Symmetry is enforced structurally at construction; nondegeneracy is the
    caller's responsibility on the chart domain (the symbolic inverse will
    surface a zero determinant as a division error at evaluation time).
    """

    chart: Chart
    rows: tuple

    def __post_init__(self):
        rows = _square_rows(self.rows, self.chart.dim)
        for i in range(self.chart.dim):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise FieldError(
                        f"metric entries ({i},{j}) and ({j},{i}) differ "
                        "structurally; build from an upper triangle")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def euclidean(cls, chart: Chart) -> "MetricField":
        n = chart.dim
        return cls(chart, tuple(tuple(ONE if i == j else ZERO for j in range(n))
                                for i in range(n)))

    @classmethod
    def diagonal(cls, chart: Chart, entries: Sequence) -> "MetricField":
        n = chart.dim
        ent = _as_tuple(entries)
        if len(ent) != n:
            raise FieldError(f"need {n} diagonal entries")
        return cls(chart, tuple(tuple(ent[i] if i == j else ZERO
                                      for j in range(n)) for i in range(n)))

    @classmethod
    def from_potential(cls, chart: Chart, phi: Expr) -> "MetricField":
        """Coordinate Hessian of a potential; the flat-connection Hessian.

        Only the upper triangle is differentiated and it is mirrored, so the
        stored matrix is structurally symmetric even though the two mixed
        partial orders would build different (equal-valued) trees.
        """
        names = chart.coords
        n = chart.dim
        upper = {}
        for i in range(n):
            di = phi.diff(names[i])
            for j in range(i, n):
                upper[(i, j)] = di.diff(names[j])
        rows = tuple(tuple(upper[(min(i, j), max(i, j))] for j in range(n))
                     for i in range(n))
        return cls(chart, rows)

    @classmethod
    def conformal_euclidean(cls, chart: Chart, factor: Expr) -> "MetricField":
        n = chart.dim
        return cls(chart, tuple(tuple(factor if i == j else ZERO
                                      for j in range(n)) for i in range(n)))

    def entry(self, i: int, j: int) -> Expr:
        return self.rows[i][j]

    def apply(self, X: VectorField, Y: VectorField) -> Expr:
        return TensorField02(self.chart, self.rows).apply(X, Y)

    def as_tensor(self) -> TensorField02:
        return TensorField02(self.chart, self.rows)

    def flat_components(self) -> tuple:
        return tuple(e for r in self.rows for e in r)


@dataclass(frozen=True)
class BilinearVVField:
    """Vector-valued pointwise-bilinear map: components T^k_{ij}.

    comps[k][i][j] multiplies X^i Y^j and lands on the k-th coordinate field.
    """

    chart: Chart
    comps: tuple

    def __post_init__(self):
        n = self.chart.dim
        comps = tuple(_square_rows(layer, n) for layer in self.comps)
        if len(comps) != n:
            raise FieldError(f"need {n} component layers")
        object.__setattr__(self, "comps", comps)

    def apply(self, X: VectorField, Y: VectorField) -> VectorField:
        _check_same_chart(self, X)
        _check_same_chart(self, Y)
        n = self.chart.dim
        out = []
        for k in range(n):
            out.append(add(*[mul(self.comps[k][i][j], X.components[i],
                                 Y.components[j])
                             for i in range(n) for j in range(n)]))
        return VectorField(self.chart, tuple(out))

    def __add__(self, other: "BilinearVVField") -> "BilinearVVField":
        _check_same_chart(self, other)
        n = self.chart.dim
        return BilinearVVField(self.chart, tuple(
            tuple(tuple(add(self.comps[k][i][j], other.comps[k][i][j])
                        for j in range(n)) for i in range(n)) for k in range(n)))

    def __sub__(self, other: "BilinearVVField") -> "BilinearVVField":
        _check_same_chart(self, other)
        n = self.chart.dim
        return BilinearVVField(self.chart, tuple(
            tuple(tuple(sub(self.comps[k][i][j], other.comps[k][i][j])
                        for j in range(n)) for i in range(n)) for k in range(n)))

    def flat_components(self) -> tuple:
        return tuple(e for layer in self.comps for r in layer for e in r)


# ---------------------------------------------------------------------------
# basic differential-geometric operations that need no connection


def vf_apply(X: VectorField, f: Expr) -> Expr:
    """Directional derivative X(f) = X^i d_i f."""
    names = X.chart.coords
    return add(*[mul(X.components[i], f.diff(names[i]))
                 for i in range(X.chart.dim)])


@lru_cache(maxsize=4096)
def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y]^k = X(Y^k) - Y(X^k)."""
    _check_same_chart(X, Y)
    return VectorField(X.chart, tuple(
        sub(vf_apply(X, Y.components[k]), vf_apply(Y, X.components[k]))
        for k in range(X.chart.dim)))


def coordinate_fields(chart: Chart) -> tuple:
    n = chart.dim
    return tuple(VectorField(chart, tuple(ONE if i == k else ZERO
                                          for i in range(n)))
                 for k in range(n))


def euler_field(chart: Chart) -> VectorField:
    """The radial field x^i d_i."""
    return VectorField(chart, tuple(Var(c) for c in chart.coords))


def zero_vector_field(chart: Chart) -> VectorField:
    return VectorField(chart, (ZERO,) * chart.dim)


def metric_det(g: MetricField) -> Expr:
    return _det(g.rows, g.chart.dim)


def _det(rows, n: int) -> Expr:
    if n == 1:
        return rows[0][0]
    if n == 2:
        return sub(mul(rows[0][0], rows[1][1]), mul(rows[0][1], rows[1][0]))
    if n == 3:
        terms = []
        for perm, sign in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                           ((2, 1, 0), -1), ((1, 0, 2), -1), ((0, 2, 1), -1)):
            t = mul(rows[0][perm[0]], rows[1][perm[1]], rows[2][perm[2]])
            terms.append(t if sign > 0 else neg(t))
        return add(*terms)
    raise FieldError("determinant implemented for dimensions 1..3")


@lru_cache(maxsize=256)
def metric_inverse_rows(g: MetricField) -> tuple:
    """Symbolic inverse metric g^{ij} by the adjugate formula (dim <= 3)."""
    n = g.chart.dim
    d = metric_det(g)
    if n == 1:
        return ((div(ONE, d),),)
    if n == 2:
        a, b = g.rows[0]
        _, c = g.rows[1]
        return (
            (div(c, d), div(neg(b), d)),
            (div(neg(b), d), div(a, d)),
        )
    if n == 3:
        r = g.rows
        out = []
        for i in range(3):
            row = []
            for j in range(3):
                i1, i2 = [t for t in range(3) if t != j]
                j1, j2 = [t for t in range(3) if t != i]
                minor = sub(mul(r[i1][j1], r[i2][j2]), mul(r[i1][j2], r[i2][j1]))
                cof = minor if (i + j) % 2 == 0 else neg(minor)
                row.append(div(cof, d))
            out.append(tuple(row))
        return tuple(out)
    raise FieldError("metric inverse implemented for dimensions 1..3")


def sharp(omega: OneForm, g: MetricField) -> VectorField:
    """Raise the index: (omega^#)^i = g^{ij} omega_j."""
    _check_same_chart(omega, g)
    inv = metric_inverse_rows(g)
    n = g.chart.dim
    return VectorField(g.chart, tuple(
        add(*[mul(inv[i][j], omega.components[j]) for j in range(n)])
        for i in range(n)))


def flat(X: VectorField, g: MetricField) -> OneForm:
    """Lower the index: (X^b)_i = g_{ij} X^j."""
    _check_same_chart(X, g)
    n = g.chart.dim
    return OneForm(g.chart, tuple(
        add(*[mul(g.rows[i][j], X.components[j]) for j in range(n)])
        for i in range(n)))


# ---------------------------------------------------------------------------
# sampled equality probes


@dataclass(frozen=True)
class ProbeConfig:
    """Sampling parameters shared by every numeric probe."""

    samples: int = 100
    tolerance: float = 1e-9
    seed: int = 42
    tuples: int = 3

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass(frozen=True)
class EqualityReport:
    """Outcome of a sampled comparison.

    entries pairs each sample point with its residual, in sampling order;
    passed is max_residual <= tolerance.
    """

    sample_count: int
    entries: tuple
    max_residual: float
    mean_residual: float
    tolerance: float
    passed: bool

    @property
    def worst_point(self):
        if not self.entries:
            return None
        return max(self.entries, key=lambda pr: pr[1])[0]

    def __str__(self):
        verdict = "pass" if self.passed else "FAIL"
        return (f"{verdict}: max {self.max_residual:.3e} "
                f"mean {self.mean_residual:.3e} over {self.sample_count} "
                f"points (tol {self.tolerance:.1e})")


def residual_arrays(left: Sequence[Expr], right: Sequence[Expr],
                    env: dict) -> np.ndarray:
    """Pointwise scaled residuals between two component lists.

    max_k |a_k - b_k| / (1 + max_k max(|a_k|, |b_k|)) per sample point.
    """
    if len(left) != len(right):
        raise FieldError("component count mismatch")
    la = evaluate_many_multi(list(left) + list(right), env)
    a = np.stack(la[:len(left)])
    b = np.stack(la[len(left):])
    diff = np.max(np.abs(a - b), axis=0)
    scale = 1.0 + np.maximum(np.max(np.abs(a), axis=0),
                             np.max(np.abs(b), axis=0))
    return diff / scale


def report_from_residuals(points: np.ndarray, res: np.ndarray,
                          tolerance: float) -> EqualityReport:
    entries = tuple((tuple(float(c) for c in p), float(r))
                    for p, r in zip(points, res))
    mx = float(np.max(res)) if len(res) else 0.0
    mn = float(np.mean(res)) if len(res) else 0.0
    return EqualityReport(len(res), entries, mx, mn, float(tolerance),
                          mx <= tolerance)


def fields_equal_probe(A, B, cfg: ProbeConfig = ProbeConfig(),
                       points: np.ndarray | None = None) -> EqualityReport:
    """Sampled equality of two fields of the same shape on one chart."""
    _check_same_chart(A, B)
    ca, cb = A.flat_components(), B.flat_components()
    if len(ca) != len(cb):
        raise FieldError("fields have different component counts")
    if points is None:
        points = A.chart.sample(cfg.samples, cfg.rng())
    res = residual_arrays(ca, cb, A.chart.env(points))
    return report_from_residuals(points, res, cfg.tolerance)


def field_zero_probe(A, cfg: ProbeConfig = ProbeConfig(),
                     points: np.ndarray | None = None) -> EqualityReport:
    zero = [ZERO] * len(A.flat_components())
    if points is None:
        points = A.chart.sample(cfg.samples, cfg.rng())
    res = residual_arrays(list(A.flat_components()), zero, A.chart.env(points))
    return report_from_residuals(points, res, cfg.tolerance)


# ---------------------------------------------------------------------------
# random fields for probe inputs; coefficients are small exact rationals so
# composed expressions stay well-conditioned on the sampling boxes


def _monomials(chart: Chart, degree: int):
    names = chart.coords
    out = []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(chart.dim),
                                                             total):
            m = ONE
            for i in combo:
                m = mul(m, Var(names[i]))
            out.append(m)
    return out


def random_polynomial(chart: Chart, rng: np.random.Generator,
                      degree: int = 2, nonzero: bool = True) -> Expr:
    """Polynomial with integer coefficients in [-2, 2]."""
    monos = _monomials(chart, degree)
    for _ in range(64):
        coeffs = rng.integers(-2, 3, size=len(monos))
        e = add(*[mul(Num(int(c)), m) for c, m in zip(coeffs, monos) if c != 0])
        if e != ZERO or not nonzero:
            return e
    raise FieldError("failed to draw a nonzero polynomial")


def random_vector_field(chart: Chart, rng: np.random.Generator,
                        degree: int = 2) -> VectorField:
    return VectorField(chart, tuple(
        random_polynomial(chart, rng, degree, nonzero=False)
        for _ in range(chart.dim)))


def random_affine_vector_field(chart: Chart,
                               rng: np.random.Generator) -> VectorField:
    """Components of total degree <= 1. On a zero-Christoffel chart these are
    exactly the fields whose second covariant derivative vanishes."""
    return random_vector_field(chart, rng, degree=1)


def random_oneform(chart: Chart, rng: np.random.Generator,
                   degree: int = 2) -> OneForm:
    return OneForm(chart, tuple(
        random_polynomial(chart, rng, degree, nonzero=False)
        for _ in range(chart.dim)))


def random_tensor12(chart: Chart, rng: np.random.Generator,
                    degree: int = 1) -> BilinearVVField:
    n = chart.dim
    return BilinearVVField(chart, tuple(
        tuple(tuple(random_polynomial(chart, rng, degree, nonzero=False)
                    for _ in range(n)) for _ in range(n)) for _ in range(n)))
