"""Expression layer: parsing, printing, differentiation, evaluation."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kvcalc.expr import (
    DomainError,
    Num,
    Var,
    ZERO,
    add,
    as_expr,
    differentiate,
    div,
    evaluate,
    evaluate_exact,
    evaluate_many,
    exp_,
    free_vars,
    ln,
    mul,
    pow_,
    simplify,
    sqrt_,
    sub,
    to_string,
)
from kvcalc.chart import Chart
from kvcalc.parse import ParseError, parse

XY = Chart(("x", "y"), ((0.3, 1.7), (0.3, 1.7)))


def parse_xy(text):
    return parse(text, XY)


# every operator and function the grammar knows, on a domain where all of
# them are defined (x, y in [0.3, 1.7] keeps ln, sqrt, atan2 happy)
FD_POOL = [
    "x^2 + 3*x*y - y^3",
    "x^4 - 2*x^2*y^2 + y^4",
    "1/(1 + x^2 + y^2)",
    "x/y",
    "(x - y)/(x + y)",
    "exp(x)*sin(y)",
    "exp(x + y^2)",
    "ln(x^2 + y^2)",
    "ln(x)*ln(y)",
    "sqrt(x^2 + y^2)",
    "sqrt(x)/y",
    "sin(x*y)",
    "cos(x^2 - y)",
    "atan(x/y)",
    "atan(x*y)",
    "atan2(y, x)",
    "x/2*ln(x^2 + y^2) + y*atan(x/y)",
    "pi*x + sin(pi*y)",
    "exp(-x^2)*cos(2*y)",
    "(1 + x)^3/(1 + y^2)",
]


def _fd(e, coord, pt, h=1e-5):
    up = dict(pt)
    dn = dict(pt)
    up[coord] = pt[coord] + h
    dn[coord] = pt[coord] - h
    return (evaluate(e, up) - evaluate(e, dn)) / (2 * h)


def test_derivative_matches_central_difference():
    # the cross-check suite: >= 100 points per expression, rel tol 1e-5
    rng = np.random.default_rng(7)
    pts = rng.uniform(0.3, 1.7, size=(110, 2))
    for text in FD_POOL:
        e = parse_xy(text)
        for coord in ("x", "y"):
            de = differentiate(e, coord)
            for px, py in pts:
                pt = {"x": float(px), "y": float(py)}
                sym = evaluate(de, pt)
                num = _fd(e, coord, pt)
                assert abs(num - sym) <= 1e-5 * (1 + abs(sym)), \
                    f"d/d{coord} {text} at {pt}"


def test_parse_print_parse_is_identity():
    for text in FD_POOL:
        e = parse_xy(text)
        printed = to_string(e)
        again = parse_xy(printed)
        assert again == e, printed


def test_print_of_simplified_round_trips():
    rng = np.random.default_rng(3)
    pts = rng.uniform(0.3, 1.7, size=(25, 2))
    for text in FD_POOL:
        e = simplify(parse_xy(text))
        again = parse_xy(to_string(e))
        for px, py in pts:
            pt = {"x": float(px), "y": float(py)}
            assert evaluate(again, pt) == pytest.approx(
                evaluate(e, pt), rel=1e-12, abs=1e-12)


def test_simplify_preserves_values():
    rng = np.random.default_rng(11)
    pts = rng.uniform(0.3, 1.7, size=(40, 2))
    for text in FD_POOL:
        e = parse_xy(text)
        s = simplify(e)
        for px, py in pts:
            pt = {"x": float(px), "y": float(py)}
            assert evaluate(s, pt) == pytest.approx(
                evaluate(e, pt), rel=1e-12, abs=1e-12), text


def test_simplify_known_collapses():
    x = Var("x")
    assert simplify(mul(Num(0), x)) == ZERO
    assert simplify(add(x, mul(Num(-1), x))) == ZERO
    assert simplify(mul(Num(1), x)) == x
    assert simplify(pow_(x, 1)) == x
    assert simplify(sub(mul(2, x), mul(2, x))) == ZERO


def test_derivative_of_constant_and_variable():
    x = Var("x")
    assert differentiate(Num(5), "x") == ZERO
    assert differentiate(x, "x") == Num(1)
    assert differentiate(x, "y") == ZERO


def test_chain_rule_through_functions():
    e = exp_(mul(Var("x"), Var("x")))
    d = differentiate(e, "x")
    pt = {"x": 0.7}
    assert evaluate(d, pt) == pytest.approx(
        2 * 0.7 * math.exp(0.49), rel=1e-12)


def test_evaluate_many_agrees_with_scalar_evaluate():
    e = parse_xy("exp(x)*sin(y) + x^3/(1 + y^2)")
    xs = np.linspace(0.3, 1.5, 17)
    ys = np.linspace(0.4, 1.6, 17)
    arr = evaluate_many(e, {"x": xs, "y": ys})
    for i in range(len(xs)):
        want = evaluate(e, {"x": float(xs[i]), "y": float(ys[i])})
        assert arr[i] == pytest.approx(want, rel=1e-14)


def test_domain_errors_are_reported_not_nan():
    e = ln(Var("x"))
    with pytest.raises(DomainError):
        evaluate(e, {"x": -1.0})
    with pytest.raises(DomainError):
        evaluate(e, {"x": 0.0})
    with pytest.raises(DomainError):
        evaluate(sqrt_(Var("x")), {"x": -0.5})
    with pytest.raises(DomainError):
        evaluate(div(Num(1), Var("x")), {"x": 0.0})


def test_domain_error_vectorized():
    e = ln(Var("x"))
    with pytest.raises(DomainError):
        evaluate_many(e, {"x": np.array([1.0, -2.0])})


def test_evaluate_exact_rational():
    e = parse_xy("x^2/4 - y/3")
    got = evaluate_exact(e, {"x": Fraction(1, 2), "y": Fraction(1, 5)})
    assert got == Fraction(1, 16) - Fraction(1, 15)


def test_parse_rejects_unknown_names():
    with pytest.raises(ParseError):
        parse_xy("x + q")
    with pytest.raises(ParseError):
        parse_xy("foo(x)")


def test_parse_rejects_malformed():
    for bad in ("x +", "(x", "x^y", "1..2", "x**2", ""):
        with pytest.raises(ParseError):
            parse_xy(bad)


def test_free_vars():
    e = parse("x*y + sin(x)", Chart(("x", "y", "z"), ((0, 1),) * 3))
    assert free_vars(e) == frozenset({"x", "y"})


@settings(max_examples=60, derandomize=True)
@given(
    a=st.integers(-4, 4), b=st.integers(-4, 4), c=st.integers(-4, 4),
    x0=st.floats(0.2, 1.8), y0=st.floats(0.2, 1.8),
)
def test_polynomial_derivative_exact(a, b, c, x0, y0):
    # d/dx (a x^3 + b x y + c y^2) = 3 a x^2 + b y, checked pointwise
    x, y = Var("x"), Var("y")
    e = add(mul(a, pow_(x, 3)), mul(b, x, y), mul(c, pow_(y, 2)))
    d = differentiate(e, "x")
    pt = {"x": x0, "y": y0}
    assert evaluate(d, pt) == pytest.approx(3 * a * x0 * x0 + b * y0,
                                            rel=1e-12, abs=1e-12)


@settings(max_examples=40, derandomize=True)
@given(st.integers(-6, 6), st.integers(1, 6))
def test_rational_constants_fold(p, q):
    e = div(Num(p), Num(q))
    assert evaluate(e, {}) == pytest.approx(p / q, rel=1e-15)
    assert as_expr(Fraction(p, q)) == simplify(e)
