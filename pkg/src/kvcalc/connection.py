"""Affine connections in coordinates: Christoffel symbols and everything
built from them (covariant derivatives, torsion, curvature, metric
constructions, conjugation by a metric).

Index convention: gamma[k][i][j] is the coefficient of the k-th coordinate
field in the covariant derivative of the j-th along the i-th, so
(D_X Y)^k = X(Y^k) + gamma[k][i][j] X^i Y^j.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .chart import Chart
from .expr import Expr, ONE, ZERO, add, as_expr, div, mul, neg, sub
from .fields import (
    BilinearVVField,
    EqualityReport,
    FieldError,
    MetricField,
    OneForm,
    ProbeConfig,
    TensorField02,
    VectorField,
    _check_same_chart,
    field_zero_probe,
    fields_equal_probe,
    lie_bracket,
    metric_inverse_rows,
    sharp,
    vf_apply,
)

__all__ = [
    "Connection",
    "flat_connection",
    "connection_from_tensor",
    "cov_deriv_vf",
    "cov_deriv_oneform",
    "cov_deriv_tensor02",
    "torsion_tensor",
    "torsion_probe",
    "curvature_operator",
    "curvature_tensor_comps",
    "curvature_field",
    "flatness_probe",
    "connections_equal_probe",
    "metric_compat_probe",
    "levi_civita",
    "conjugate",
    "average",
    "connection_difference",
    "codazzi_tensor",
    "codazzi_probe",
    "differential",
    "grad",
    "hessian",
    "laplacian",
]


@dataclass(frozen=True)
class Connection:
    """Christoffel symbols gamma[k][i][j] on a chart."""

    chart: Chart
    gamma: tuple
    label: str = ""

    def __post_init__(self):
        n = self.chart.dim
        g = tuple(tuple(tuple(as_expr(e) for e in row) for row in layer)
                  for layer in self.gamma)
        if len(g) != n or any(len(l) != n or any(len(r) != n for r in l)
                              for l in g):
            raise FieldError(f"christoffel table must be {n}x{n}x{n}")
        object.__setattr__(self, "gamma", g)

    def __eq__(self, other):
        if not isinstance(other, Connection):
            return NotImplemented
        # label is cosmetic
        return self.chart == other.chart and self.gamma == other.gamma

    def __hash__(self):
        return hash((self.chart, self.gamma))


def flat_connection(chart: Chart, label: str = "flat") -> Connection:
    n = chart.dim
    zeros = tuple(tuple((ZERO,) * n for _ in range(n)) for _ in range(n))
    return Connection(chart, zeros, label)


def connection_from_tensor(base: Connection, T: BilinearVVField,
                           label: str = "") -> Connection:
    """base + T: shift the Christoffel table by a bilinear field."""
    _check_same_chart(base, T)
    n = base.chart.dim
    gamma = tuple(tuple(tuple(add(base.gamma[k][i][j], T.comps[k][i][j])
                              for j in range(n)) for i in range(n))
                  for k in range(n))
    return Connection(base.chart, gamma, label)


@lru_cache(maxsize=16384)
def cov_deriv_vf(c: Connection, X: VectorField, Y: VectorField) -> VectorField:
    """(D_X Y)^k = X(Y^k) + gamma^k_{ij} X^i Y^j."""
    _check_same_chart(c, X)
    _check_same_chart(c, Y)
    n = c.chart.dim
    comps = []
    for k in range(n):
        corr = [mul(c.gamma[k][i][j], X.components[i], Y.components[j])
                for i in range(n) for j in range(n)]
        comps.append(add(vf_apply(X, Y.components[k]), *corr))
    return VectorField(c.chart, tuple(comps))


def cov_deriv_oneform(c: Connection, X: VectorField, w: OneForm) -> OneForm:
    """(D_X w)_j = X^i (d_i w_j - gamma^k_{ij} w_k)."""
    _check_same_chart(c, X)
    _check_same_chart(c, w)
    n = c.chart.dim
    names = c.chart.coords
    comps = []
    for j in range(n):
        terms = []
        for i in range(n):
            inner = sub(w.components[j].diff(names[i]),
                        add(*[mul(c.gamma[k][i][j], w.components[k])
                              for k in range(n)]))
            terms.append(mul(X.components[i], inner))
        comps.append(add(*terms))
    return OneForm(c.chart, tuple(comps))


def cov_deriv_tensor02(c: Connection, X: VectorField, h) -> TensorField02:
    """(D_X h)_{jk} = X^i (d_i h_{jk} - gamma^l_{ij} h_{lk} - gamma^l_{ik} h_{jl})."""
    _check_same_chart(c, X)
    _check_same_chart(c, h)
    rows = h.rows
    n = c.chart.dim
    names = c.chart.coords
    out = []
    for j in range(n):
        row = []
        for k in range(n):
            terms = []
            for i in range(n):
                inner = sub(rows[j][k].diff(names[i]),
                            add(*([mul(c.gamma[l][i][j], rows[l][k])
                                   for l in range(n)] +
                                  [mul(c.gamma[l][i][k], rows[j][l])
                                   for l in range(n)])))
                terms.append(mul(X.components[i], inner))
            row.append(add(*terms))
        out.append(tuple(row))
    return TensorField02(c.chart, tuple(out))


def torsion_tensor(c: Connection) -> BilinearVVField:
    """T^k_{ij} = gamma^k_{ij} - gamma^k_{ji}."""
    n = c.chart.dim
    return BilinearVVField(c.chart, tuple(
        tuple(tuple(sub(c.gamma[k][i][j], c.gamma[k][j][i]) for j in range(n))
              for i in range(n)) for k in range(n)))


def torsion_probe(c: Connection, cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    return field_zero_probe(torsion_tensor(c), cfg)


def curvature_operator(c: Connection, X: VectorField, Y: VectorField,
                       Z: VectorField) -> VectorField:
    """R(X,Y)Z = D_X D_Y Z - D_Y D_X Z - D_{[X,Y]} Z."""
    return (cov_deriv_vf(c, X, cov_deriv_vf(c, Y, Z))
            - cov_deriv_vf(c, Y, cov_deriv_vf(c, X, Z))
            - cov_deriv_vf(c, lie_bracket(X, Y), Z))


@lru_cache(maxsize=256)
def curvature_tensor_comps(c: Connection) -> tuple:
    """R[k][l][i][j]: the k-component of R(d_i, d_j) d_l, from the
    Christoffel coordinate formula (independent of curvature_operator)."""
    n = c.chart.dim
    names = c.chart.coords
    out = []
    for k in range(n):
        lk = []
        for l in range(n):
            ij = []
            for i in range(n):
                row = []
                for j in range(n):
                    t = sub(c.gamma[k][j][l].diff(names[i]),
                            c.gamma[k][i][l].diff(names[j]))
                    quad = [mul(c.gamma[k][i][m], c.gamma[m][j][l])
                            for m in range(n)]
                    quad += [neg(mul(c.gamma[k][j][m], c.gamma[m][i][l]))
                             for m in range(n)]
                    row.append(add(t, *quad))
                ij.append(tuple(row))
            lk.append(tuple(ij))
        out.append(tuple(lk))
    return tuple(out)


@dataclass(frozen=True)
class _CurvatureComponents:
    """Flattened curvature components, shaped like a field for probing."""

    chart: Chart
    comps: tuple

    def flat_components(self):
        return self.comps


def curvature_field(c: Connection) -> _CurvatureComponents:
    comps = curvature_tensor_comps(c)
    flat = tuple(e for k in comps for l in k for row in l for e in row)
    return _CurvatureComponents(c.chart, flat)


def flatness_probe(c: Connection, cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    return field_zero_probe(curvature_field(c), cfg)


@dataclass(frozen=True)
class _GammaComponents:
    chart: Chart
    comps: tuple

    def flat_components(self):
        return self.comps


def _gamma_field(c: Connection) -> _GammaComponents:
    return _GammaComponents(c.chart, tuple(
        e for layer in c.gamma for row in layer for e in row))


def connections_equal_probe(a: Connection, b: Connection,
                            cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    _check_same_chart(a, b)
    return fields_equal_probe(_gamma_field(a), _gamma_field(b), cfg)


def metric_compat_probe(c: Connection, g: MetricField,
                        cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    """Probe d_i g_{jk} - gamma^l_{ij} g_{lk} - gamma^l_{ik} g_{jl} = 0."""
    n = c.chart.dim
    names = c.chart.coords
    comps = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                comps.append(sub(g.rows[j][k].diff(names[i]),
                                 add(*([mul(c.gamma[l][i][j], g.rows[l][k])
                                        for l in range(n)] +
                                       [mul(c.gamma[l][i][k], g.rows[j][l])
                                        for l in range(n)]))))
    return field_zero_probe(_GammaComponents(c.chart, tuple(comps)), cfg)


def levi_civita(g: MetricField, label: str = "levi-civita") -> Connection:
    """gamma^k_{ij} = (1/2) g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})."""
    n = g.chart.dim
    names = g.chart.coords
    inv = metric_inverse_rows(g)
    gamma = []
    for k in range(n):
        layer = []
        for i in range(n):
            row = []
            for j in range(n):
                terms = []
                for l in range(n):
                    s = add(g.rows[j][l].diff(names[i]),
                            g.rows[i][l].diff(names[j]),
                            neg(g.rows[i][j].diff(names[l])))
                    terms.append(mul(inv[k][l], s))
                row.append(mul(as_expr(1) / 2, add(*terms)))
            layer.append(tuple(row))
        gamma.append(tuple(layer))
    return Connection(g.chart, tuple(gamma), label)


def conjugate(c: Connection, g: MetricField, label: str = "conjugate") -> Connection:
    """The g-conjugate connection: Z g(X,Y) = g(D_Z X, Y) + g(X, D*_Z Y).

    In coordinates gamma*^m_{ij} = g^{ml} (d_i g_{lj} - gamma^n_{il} g_{nj}).
    """
    _check_same_chart(c, g)
    n = c.chart.dim
    names = c.chart.coords
    inv = metric_inverse_rows(g)
    gamma = []
    for m in range(n):
        layer = []
        for i in range(n):
            row = []
            for j in range(n):
                terms = []
                for l in range(n):
                    inner = sub(g.rows[l][j].diff(names[i]),
                                add(*[mul(c.gamma[nn][i][l], g.rows[nn][j])
                                      for nn in range(n)]))
                    terms.append(mul(inv[m][l], inner))
                row.append(add(*terms))
            layer.append(tuple(row))
        gamma.append(tuple(layer))
    return Connection(c.chart, tuple(gamma), label)


def average(a: Connection, b: Connection, label: str = "average") -> Connection:
    _check_same_chart(a, b)
    n = a.chart.dim
    half = as_expr(1) / 2
    gamma = tuple(tuple(tuple(mul(half, add(a.gamma[k][i][j], b.gamma[k][i][j]))
                              for j in range(n)) for i in range(n))
                  for k in range(n))
    return Connection(a.chart, gamma, label)


def connection_difference(a: Connection, b: Connection) -> BilinearVVField:
    """The tensor a - b (difference of two connections is bilinear over
    functions)."""
    _check_same_chart(a, b)
    n = a.chart.dim
    return BilinearVVField(a.chart, tuple(
        tuple(tuple(sub(a.gamma[k][i][j], b.gamma[k][i][j]) for j in range(n))
              for i in range(n)) for k in range(n)))


def codazzi_tensor(h, c: Connection) -> tuple:
    """Components C_{ijk} = (D_{d_i} h)_{jk} - (D_{d_j} h)_{ik}; the
    Codazzi coupling of (h, D) holds iff all vanish."""
    _check_same_chart(h, c)
    n = c.chart.dim
    names = c.chart.coords

    def cov_i(i, j, k):
        return sub(h.rows[j][k].diff(names[i]),
                   add(*([mul(c.gamma[l][i][j], h.rows[l][k]) for l in range(n)]
                         + [mul(c.gamma[l][i][k], h.rows[j][l])
                            for l in range(n)])))

    return tuple(sub(cov_i(i, j, k), cov_i(j, i, k))
                 for i in range(n) for j in range(n) for k in range(n))


def codazzi_probe(h, c: Connection,
                  cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    return field_zero_probe(_GammaComponents(c.chart, codazzi_tensor(h, c)), cfg)


def differential(f: Expr, chart: Chart) -> OneForm:
    return OneForm(chart, tuple(f.diff(c) for c in chart.coords))


def grad(f: Expr, g: MetricField) -> VectorField:
    """(grad f)^i = g^{ij} d_j f."""
    return sharp(differential(f, g.chart), g)


def hessian(f: Expr, c: Connection) -> TensorField02:
    """(D df)_{ij} = d_i d_j f - gamma^k_{ij} d_k f."""
    n = c.chart.dim
    names = c.chart.coords
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            row.append(sub(f.diff(names[i]).diff(names[j]),
                           add(*[mul(c.gamma[k][i][j], f.diff(names[k]))
                                 for k in range(n)])))
        rows.append(tuple(row))
    return TensorField02(c.chart, tuple(rows))


def laplacian(f: Expr, g: MetricField) -> Expr:
    """Laplace-Beltrami via trace of the Levi-Civita Hessian."""
    h = hessian(f, levi_civita(g))
    inv = metric_inverse_rows(g)
    n = g.chart.dim
    return add(*[mul(inv[i][j], h.rows[i][j])
                 for i in range(n) for j in range(n)])
