"""Vector-valued differential forms twisted by a connection.

A degree-k twisted form stores, for every increasing index tuple I, the
target components theta^m_I of theta(d_{i_1}, ..., d_{i_k}). The twisted
exterior derivative follows the alternating-sum formula

    (d theta)(X_0..X_k) = sum_i (-1)^i D_{X_i} theta(X_0..^X_i..X_k)
                        + sum_{i<j} (-1)^{i+j} theta([X_i,X_j], X_0..^i..^j..X_k)

and its square is curvature acting by wedge:

    (d(d theta)))(X_0..X_{k+1}) = sum_{a<b} (-1)^{a+b-1} R(X_a,X_b) theta(rest).

On a zero-Christoffel chart d decouples into an ordinary scalar exterior
derivative per target component; that decomposition is probed against an
independent combinatorial implementation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .chart import Chart
from .connection import Connection, cov_deriv_vf, curvature_tensor_comps
from .expr import Expr, ZERO, add, as_expr, mul, neg, sub
from .fields import (
    EqualityReport,
    FieldError,
    ProbeConfig,
    VectorField,
    coordinate_fields,
    field_zero_probe,
    fields_equal_probe,
    lie_bracket,
    random_polynomial,
    random_vector_field,
    report_from_residuals,
    residual_arrays,
    zero_vector_field,
)

__all__ = [
    "DerhamError",
    "TwistedForm",
    "zero_twisted_form",
    "twisted_form_from_terms",
    "random_twisted_form",
    "dnabla_apply",
    "d_nabla",
    "curvature_wedge_apply",
    "scalar_exterior_derivative",
    "flat_decomposition_probe",
    "d2_flat_probe",
    "curvature_identity_probe",
    "form_consistency_probe",
]


class DerhamError(ValueError):
    """Twisted-form construction or degree error."""


def _incr_tuples(n: int, k: int):
    return tuple(itertools.combinations(range(n), k))


@dataclass(frozen=True)
class TwistedForm:
    """Antisymmetric k-linear map with vector-field values, in components.

    comps maps each increasing index tuple to the tuple of target
    components; every increasing tuple of the chart dimension is present.
    """

    chart: Chart
    degree: int
    comps: tuple  # ((idx_tuple, (Expr, ...)), ...) sorted by idx_tuple

    def __post_init__(self):
        n = self.chart.dim
        if not 0 <= self.degree <= n:
            raise DerhamError(
                f"degree {self.degree} outside 0..{n} on this chart")
        want = _incr_tuples(n, self.degree)
        got = dict(self.comps)
        if tuple(sorted(got)) != want:
            raise DerhamError("component table must cover exactly the "
                              "increasing index tuples")
        fixed = tuple((idx, tuple(as_expr(c) for c in got[idx]))
                      for idx in want)
        for idx, target in fixed:
            if len(target) != n:
                raise DerhamError(f"target components for {idx} must have "
                                  f"length {n}")
        object.__setattr__(self, "comps", fixed)

    def component(self, idx: tuple) -> tuple:
        for i, target in self.comps:
            if i == idx:
                return target
        raise DerhamError(f"no component {idx}")

    def evaluate(self, *fields: VectorField) -> VectorField:
        """Multilinear antisymmetric extension to arbitrary fields."""
        if len(fields) != self.degree:
            raise DerhamError(
                f"degree-{self.degree} form called with {len(fields)} fields")
        for f in fields:
            if f.chart != self.chart:
                raise DerhamError("argument lives on a different chart")
        n = self.chart.dim
        out = [ZERO] * n
        for idx, target in self.comps:
            det = _minor_det(fields, idx)
            if det == ZERO:
                continue
            for m in range(n):
                out[m] = add(out[m], mul(det, target[m]))
        return VectorField(self.chart, tuple(out))

    def flat_components(self) -> tuple:
        return tuple(c for _, target in self.comps for c in target)


def _minor_det(fields: Sequence[VectorField], idx: tuple) -> Expr:
    """det of the k x k matrix fields[a].components[idx[b]]."""
    k = len(idx)
    if k == 0:
        return as_expr(1)
    terms = []
    for perm in itertools.permutations(range(k)):
        sign = _perm_sign(perm)
        prod = mul(*[fields[a].components[idx[perm[a]]] for a in range(k)])
        terms.append(prod if sign > 0 else neg(prod))
    return add(*terms)


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def zero_twisted_form(chart: Chart, degree: int) -> TwistedForm:
    n = chart.dim
    zeros = (ZERO,) * n
    return TwistedForm(chart, degree, tuple(
        (idx, zeros) for idx in _incr_tuples(n, degree)))


def twisted_form_from_terms(chart: Chart, degree: int,
                            terms: Sequence) -> TwistedForm:
    """Build from (index_tuple, target_index, expression) triples.

    Index tuples may arrive unsorted; they are normalized with the sign of
    the sorting permutation, and duplicate entries accumulate.
    """
    n = chart.dim
    table = {idx: [ZERO] * n for idx in _incr_tuples(n, degree)}
    for raw_idx, target, e in terms:
        idx = tuple(raw_idx)
        if len(idx) != degree:
            raise DerhamError(f"index tuple {idx} has wrong length")
        if len(set(idx)) != len(idx):
            continue  # repeated index: antisymmetry kills the term
        if any(not 0 <= i < n for i in idx):
            raise DerhamError(f"index out of range in {idx}")
        if not 0 <= target < n:
            raise DerhamError(f"target index {target} out of range")
        order = tuple(sorted(range(degree), key=lambda a: idx[a]))
        sign = _perm_sign(order)
        key = tuple(sorted(idx))
        e = as_expr(e)
        table[key][target] = add(table[key][target],
                                 e if sign > 0 else neg(e))
    return TwistedForm(chart, degree, tuple(
        (idx, tuple(target)) for idx, target in sorted(table.items())))


def random_twisted_form(chart: Chart, rng: np.random.Generator, degree: int,
                        poly_degree: int = 2) -> TwistedForm:
    n = chart.dim
    return TwistedForm(chart, degree, tuple(
        (idx, tuple(random_polynomial(chart, rng, poly_degree, nonzero=False)
                    for _ in range(n)))
        for idx in _incr_tuples(n, degree)))


# ---------------------------------------------------------------------------
# the twisted exterior derivative


def dnabla_apply(c: Connection, theta: TwistedForm,
                 fields: Sequence[VectorField]) -> VectorField:
    """The alternating-sum formula applied to k+1 arbitrary fields."""
    k = theta.degree
    if len(fields) != k + 1:
        raise DerhamError(f"need {k + 1} argument fields")
    out = zero_vector_field(theta.chart)
    for i in range(k + 1):
        rest = tuple(fields[:i]) + tuple(fields[i + 1:])
        term = cov_deriv_vf(c, fields[i], theta.evaluate(*rest))
        out = out + term if i % 2 == 0 else out - term
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            br = lie_bracket(fields[i], fields[j])
            rest = tuple(f for t, f in enumerate(fields) if t != i and t != j)
            term = theta.evaluate(br, *rest)
            out = out + term if (i + j) % 2 == 0 else out - term
    return out


def d_nabla(c: Connection, theta: TwistedForm) -> TwistedForm:
    """Component form of the twisted exterior derivative.

    Components are extracted by applying the general formula to coordinate
    fields, whose brackets vanish.
    """
    if theta.chart != c.chart:
        raise DerhamError("form and connection live on different charts")
    k = theta.degree
    n = theta.chart.dim
    if k + 1 > n:
        raise DerhamError(f"degree {k} form has no degree-{k + 1} "
                          f"derivative on a dimension-{n} chart")
    dd = coordinate_fields(theta.chart)
    comps = []
    for idx in _incr_tuples(n, k + 1):
        val = dnabla_apply(c, theta, [dd[i] for i in idx])
        comps.append((idx, val.components))
    return TwistedForm(theta.chart, k + 1, tuple(comps))


def curvature_wedge_apply(c: Connection, theta: TwistedForm,
                          fields: Sequence[VectorField]) -> VectorField:
    """(R wedge theta)(X_0..X_{k+1}) = sum_{a<b} (-1)^{a+b-1} R(X_a, X_b)
    applied to theta(remaining fields), with R from the Christoffel
    coordinate formula (an independent route from iterating d)."""
    k = theta.degree
    if len(fields) != k + 2:
        raise DerhamError(f"need {k + 2} argument fields")
    n = theta.chart.dim
    R = curvature_tensor_comps(c)
    out = zero_vector_field(theta.chart)
    for a in range(k + 2):
        for b in range(a + 1, k + 2):
            rest = tuple(f for t, f in enumerate(fields) if t != a and t != b)
            s = theta.evaluate(*rest)
            Xa, Xb = fields[a], fields[b]
            comps = []
            for kk in range(n):
                terms = []
                for l in range(n):
                    for i in range(n):
                        for j in range(n):
                            terms.append(mul(R[kk][l][i][j],
                                             Xa.components[i],
                                             Xb.components[j],
                                             s.components[l]))
                comps.append(add(*terms))
            term = VectorField(theta.chart, tuple(comps))
            out = out - term if (a + b) % 2 == 0 else out + term
    return out


# ---------------------------------------------------------------------------
# scalar forms, for the flat decoupling probe


def scalar_exterior_derivative(chart: Chart, degree: int,
                               comps: Mapping) -> dict:
    """Ordinary exterior derivative on scalar k-form components.

    comps maps increasing index tuples to expressions; returns the same
    encoding in degree k+1: (d w)_J = sum_b (-1)^b d_{j_b} w_{J minus j_b}.
    """
    n = chart.dim
    names = chart.coords
    out = {}
    for J in _incr_tuples(n, degree + 1):
        terms = []
        for b, jb in enumerate(J):
            rest = J[:b] + J[b + 1:]
            e = comps[rest].diff(names[jb])
            terms.append(e if b % 2 == 0 else neg(e))
        out[J] = add(*terms)
    return out


@dataclass(frozen=True)
class _Components:
    chart: Chart
    comps: tuple

    def flat_components(self):
        return self.comps


def flat_decomposition_probe(c: Connection, theta: TwistedForm,
                             cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    """On a flat trivialized chart, d twisted = scalar d per target slot."""
    n = theta.chart.dim
    twisted = d_nabla(c, theta)
    left = tuple(comp for _, target in twisted.comps for comp in target)
    right = []
    for m in range(n):
        slice_m = {idx: target[m] for idx, target in theta.comps}
        dm = scalar_exterior_derivative(theta.chart, theta.degree, slice_m)
        right.append(dm)
    # reorder right to match left: by index tuple, then target slot
    right_flat = []
    for idx in _incr_tuples(n, theta.degree + 1):
        for m in range(n):
            right_flat.append(right[m][idx])
    return fields_equal_probe(_Components(theta.chart, left),
                              _Components(theta.chart, tuple(right_flat)), cfg)


def d2_flat_probe(c: Connection, theta: TwistedForm,
                  cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    """d(d theta) = 0 when the connection is flat."""
    return field_zero_probe(d_nabla(c, d_nabla(c, theta)), cfg)


def curvature_identity_probe(c: Connection, theta: TwistedForm,
                             cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    """d(d theta) = R wedge theta on random argument tuples."""
    chart = theta.chart
    dd2 = d_nabla(c, d_nabla(c, theta))

    rng = cfg.rng()
    points = chart.sample(cfg.samples, rng)
    env = chart.env(points)
    agg = None
    for _ in range(max(1, cfg.tuples)):
        fields = [random_vector_field(chart, rng, degree=1)
                  for _ in range(theta.degree + 2)]
        left = dd2.evaluate(*fields)
        right = curvature_wedge_apply(c, theta, fields)
        res = residual_arrays(list(left.components), list(right.components),
                              env)
        agg = res if agg is None else np.maximum(agg, res)
    return report_from_residuals(points, agg, cfg.tolerance)


def form_consistency_probe(c: Connection, theta: TwistedForm,
                           cfg: ProbeConfig = ProbeConfig()) -> EqualityReport:
    """The component route and the direct formula agree on random fields."""
    chart = theta.chart
    comp_route = d_nabla(c, theta)

    rng = cfg.rng()
    points = chart.sample(cfg.samples, rng)
    env = chart.env(points)
    agg = None
    for _ in range(max(1, cfg.tuples)):
        fields = [random_vector_field(chart, rng)
                  for _ in range(theta.degree + 1)]
        left = comp_route.evaluate(*fields)
        right = dnabla_apply(c, theta, fields)
        res = residual_arrays(list(left.components), list(right.components),
                              env)
        agg = res if agg is None else np.maximum(agg, res)
    return report_from_residuals(points, agg, cfg.tolerance)
