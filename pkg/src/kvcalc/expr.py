"""Exact symbolic scalar expressions over chart coordinates.

Nodes are immutable and structurally hashable; all arithmetic goes through
smart constructors that fold rational constants and the 0/1 identities, so
composed expressions stay compact without a full simplifier pass. Constants
are `Fraction`s end to end; floats appear only at evaluation time.
"""
from __future__ import annotations

import sys
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

# Derivative/equality recursion tracks tree depth, which stays in the low
# thousands for everything this package builds; the default 1000 is too close.
if sys.getrecursionlimit() < 20_000:
    sys.setrecursionlimit(20_000)

Scalar = Union[int, float, Fraction]
ExprLike = Union["Expr", Scalar]

__all__ = [
    "Expr",
    "Num",
    "Var",
    "Add",
    "Mul",
    "Pow",
    "Func",
    "PI",
    "ZERO",
    "ONE",
    "ExprError",
    "DomainError",
    "as_expr",
    "add",
    "mul",
    "neg",
    "sub",
    "div",
    "pow_",
    "func",
    "exp_",
    "ln",
    "sqrt_",
    "sin_",
    "cos_",
    "atan_",
    "atan2_",
    "differentiate",
    "free_vars",
    "simplify",
    "to_string",
    "evaluate",
    "evaluate_many",
    "evaluate_many_multi",
    "FUNCTION_ARITY",
]


class ExprError(Exception):
    """Malformed expression construction."""


class DomainError(ExprError):
    """Evaluation left the domain of definition (log, root, division...).

    Carries the offending subexpression and a sample point so callers can
    report exactly where evaluation broke instead of propagating NaN.
    """

    def __init__(self, message: str, subexpr: "Expr | None" = None,
                 point: "dict[str, float] | None" = None):
        self.subexpr = subexpr
        self.point = point
        detail = message
        if subexpr is not None:
            detail += f" in '{to_string(subexpr)}'"
        if point is not None:
            coords = ", ".join(f"{k}={v:.6g}" for k, v in point.items())
            detail += f" at ({coords})"
        super().__init__(detail)


class Expr:
    """Base expression node. Subclasses are leaf or interior AST nodes."""

    __slots__ = ("_hash", "_dcache")

    def __init__(self):
        self._hash = None
        self._dcache = None

    def _key(self):
        raise NotImplementedError

    def _diff(self, coord: str) -> "Expr":
        raise NotImplementedError

    def diff(self, coord: str) -> "Expr":
        cache = self._dcache
        if cache is None:
            cache = {}
            self._dcache = cache
        hit = cache.get(coord)
        if hit is None:
            hit = self._diff(coord)
            cache[coord] = hit
        return hit

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented
        if self._hash is not None and other._hash is not None \
                and self._hash != other._hash:
            return False
        return self._key() == other._key()

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((type(self).__name__, self._key()))
            self._hash = h
        return h

    def __repr__(self):
        return f"{type(self).__name__}({to_string(self)!r})"

    def __str__(self):
        return to_string(self)

    # arithmetic sugar; everything routes through the smart constructors
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        return pow_(self, n)


class Num(Expr):
    """Exact rational constant."""

    __slots__ = ("value",)

    def __init__(self, value: Scalar):
        super().__init__()
        self.value = value if isinstance(value, Fraction) else Fraction(value)

    def _key(self):
        return (self.value,)

    def _diff(self, coord):
        return ZERO


class _Pi(Expr):
    """The constant pi. Singleton."""

    __slots__ = ()

    def _key(self):
        return ()

    def _diff(self, coord):
        return ZERO


class Var(Expr):
    """Chart coordinate."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        super().__init__()
        self.name = name

    def _key(self):
        return (self.name,)

    def _diff(self, coord):
        return ONE if coord == self.name else ZERO


class Add(Expr):
    """n-ary sum. Built flattened by add(); at least two terms."""

    __slots__ = ("terms",)

    def __init__(self, terms: tuple):
        super().__init__()
        self.terms = terms

    def _key(self):
        return self.terms

    def _diff(self, coord):
        return add(*[t.diff(coord) for t in self.terms])


class Mul(Expr):
    """n-ary product. Built flattened by mul(); at least two factors.

    A rational coefficient, if present, is always factors[0].
    """

    __slots__ = ("factors",)

    def __init__(self, factors: tuple):
        super().__init__()
        self.factors = factors

    def _key(self):
        return self.factors

    def _diff(self, coord):
        fs = self.factors
        terms = []
        for i, f in enumerate(fs):
            if isinstance(f, (Num, _Pi)):
                continue
            terms.append(mul(*fs[:i], f.diff(coord), *fs[i + 1:]))
        return add(*terms)


class Pow(Expr):
    """Integer power, exponent not in {0, 1}. Negative exponents encode division."""

    __slots__ = ("base", "exponent")

    def __init__(self, base: Expr, exponent: int):
        super().__init__()
        self.base = base
        self.exponent = exponent

    def _key(self):
        return (self.base, self.exponent)

    def _diff(self, coord):
        n = self.exponent
        return mul(Num(n), pow_(self.base, n - 1), self.base.diff(coord))


class Func(Expr):
    """Call of a named analytic function (exp, ln, sqrt, sin, cos, atan, atan2)."""

    __slots__ = ("name", "args")

    def __init__(self, name: str, args: tuple):
        super().__init__()
        self.name = name
        self.args = args

    def _key(self):
        return (self.name, self.args)

    def _diff(self, coord):
        return _FUNC_DIFF[self.name](self, coord)


ZERO = Num(0)
ONE = Num(1)
PI = _Pi()


def as_expr(v: ExprLike) -> Expr:
    """Coerce ints, Fractions and floats to Num; pass Expr through."""
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return Num(Fraction(v))
    if isinstance(v, float):
        # repr round-trips the decimal form, keeping 0.5 as 1/2 rather than
        # the raw binary fraction
        return Num(Fraction(repr(v)))
    raise ExprError(f"cannot interpret {v!r} as an expression")


def add(*terms: ExprLike) -> Expr:
    flat = []
    const = Fraction(0)
    for t in terms:
        t = as_expr(t)
        if isinstance(t, Num):
            const += t.value
        elif isinstance(t, Add):
            for s in t.terms:
                if isinstance(s, Num):
                    const += s.value
                else:
                    flat.append(s)
        else:
            flat.append(t)
    if const != 0:
        flat.append(Num(const))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors: ExprLike) -> Expr:
    flat = []
    coeff = Fraction(1)
    for f in factors:
        f = as_expr(f)
        if isinstance(f, Num):
            coeff *= f.value
        elif isinstance(f, Mul):
            for g in f.factors:
                if isinstance(g, Num):
                    coeff *= g.value
                else:
                    flat.append(g)
        else:
            flat.append(f)
    if coeff == 0:
        return ZERO
    if not flat:
        return Num(coeff)
    if coeff != 1:
        flat.insert(0, Num(coeff))
    if len(flat) == 1:
        return flat[0]
    return Mul(tuple(flat))


def neg(a: ExprLike) -> Expr:
    return mul(Num(-1), as_expr(a))


def sub(a: ExprLike, b: ExprLike) -> Expr:
    return add(as_expr(a), neg(b))


def pow_(base: ExprLike, exponent: int) -> Expr:
    base = as_expr(base)
    if not isinstance(exponent, int):
        raise ExprError(f"exponent must be an integer, got {exponent!r}")
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Num):
        if base.value == 0 and exponent < 0:
            raise ExprError("zero raised to a negative power")
        return Num(base.value ** exponent)
    if isinstance(base, Pow):
        return pow_(base.base, base.exponent * exponent)
    return Pow(base, exponent)


def div(a: ExprLike, b: ExprLike) -> Expr:
    a, b = as_expr(a), as_expr(b)
    if isinstance(b, Num):
        if b.value == 0:
            raise ExprError("division by zero constant")
        return mul(Num(1 / b.value), a)
    return mul(a, pow_(b, -1))


FUNCTION_ARITY = {
    "exp": 1,
    "ln": 1,
    "sqrt": 1,
    "sin": 1,
    "cos": 1,
    "atan": 1,
    "atan2": 2,
}


def func(name: str, *args: ExprLike) -> Expr:
    if name not in FUNCTION_ARITY:
        raise ExprError(f"unknown function '{name}'")
    args = tuple(as_expr(a) for a in args)
    if len(args) != FUNCTION_ARITY[name]:
        raise ExprError(
            f"{name} takes {FUNCTION_ARITY[name]} argument(s), got {len(args)}")
    return Func(name, args)


def exp_(a: ExprLike) -> Expr:
    return func("exp", a)


def ln(a: ExprLike) -> Expr:
    return func("ln", a)


def sqrt_(a: ExprLike) -> Expr:
    return func("sqrt", a)


def sin_(a: ExprLike) -> Expr:
    return func("sin", a)


def cos_(a: ExprLike) -> Expr:
    return func("cos", a)


def atan_(a: ExprLike) -> Expr:
    return func("atan", a)


def atan2_(y: ExprLike, x: ExprLike) -> Expr:
    return func("atan2", y, x)


def _d_exp(e, c):
    return mul(e, e.args[0].diff(c))


def _d_ln(e, c):
    return div(e.args[0].diff(c), e.args[0])


def _d_sqrt(e, c):
    return div(e.args[0].diff(c), mul(Num(2), e))


def _d_sin(e, c):
    return mul(cos_(e.args[0]), e.args[0].diff(c))


def _d_cos(e, c):
    return neg(mul(sin_(e.args[0]), e.args[0].diff(c)))


def _d_atan(e, c):
    u = e.args[0]
    return div(u.diff(c), add(ONE, pow_(u, 2)))


def _d_atan2(e, c):
    # d atan2(y, x) = (x dy - y dx) / (x^2 + y^2)
    y, x = e.args
    num = sub(mul(x, y.diff(c)), mul(y, x.diff(c)))
    return div(num, add(pow_(x, 2), pow_(y, 2)))


_FUNC_DIFF: dict[str, Callable] = {
    "exp": _d_exp,
    "ln": _d_ln,
    "sqrt": _d_sqrt,
    "sin": _d_sin,
    "cos": _d_cos,
    "atan": _d_atan,
    "atan2": _d_atan2,
}


def differentiate(e: Expr, coord: str) -> Expr:
    """Partial derivative of e with respect to the named coordinate."""
    return e.diff(coord)


def free_vars(e: Expr) -> frozenset:
    """Set of coordinate names appearing in e."""
    out = set()
    stack = [e]
    seen = set()
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        if isinstance(n, Var):
            out.add(n.name)
        elif isinstance(n, Add):
            stack.extend(n.terms)
        elif isinstance(n, Mul):
            stack.extend(n.factors)
        elif isinstance(n, Pow):
            stack.append(n.base)
        elif isinstance(n, Func):
            stack.extend(n.args)
    return frozenset(out)


# ---------------------------------------------------------------------------
# canonical ordering, used by simplify for deterministic term order

_RANK = {Num: 0, _Pi: 1, Var: 2, Func: 3, Pow: 4, Mul: 5, Add: 6}


def _sort_key(e: Expr):
    if isinstance(e, Num):
        return (0, float(e.value), e.value.numerator, e.value.denominator)
    if isinstance(e, _Pi):
        return (1,)
    if isinstance(e, Var):
        return (2, e.name)
    if isinstance(e, Func):
        return (3, e.name, tuple(_sort_key(a) for a in e.args))
    if isinstance(e, Pow):
        return (4, _sort_key(e.base), e.exponent)
    if isinstance(e, Mul):
        return (5, tuple(_sort_key(f) for f in e.factors))
    if isinstance(e, Add):
        return (6, tuple(_sort_key(t) for t in e.terms))
    raise ExprError(f"unorderable node {e!r}")


def _split_coeff(t: Expr) -> tuple:
    """Split a term into (rational coefficient, rest-or-None)."""
    if isinstance(t, Num):
        return t.value, None
    if isinstance(t, Mul) and isinstance(t.factors[0], Num):
        rest = t.factors[1:]
        core = rest[0] if len(rest) == 1 else Mul(rest)
        return t.factors[0].value, core
    return Fraction(1), t


_EXACT_FOLDS = {
    ("ln", ONE): ZERO,
    ("exp", ZERO): ONE,
    ("sin", ZERO): ZERO,
    ("cos", ZERO): ONE,
    ("atan", ZERO): ZERO,
    ("sqrt", ZERO): ZERO,
    ("sqrt", ONE): ONE,
}


def simplify(e: Expr) -> Expr:
    """Normalize: fold constants, collect like terms and like factors, sort.

    Keeps semantic equality on the common domain of e and the result; does
    not expand products. x*x^-1 collapses to 1, x - x to 0.
    """
    memo: dict[int, Expr] = {}

    def go(n: Expr) -> Expr:
        hit = memo.get(id(n))
        if hit is not None:
            return hit
        if isinstance(n, (Num, _Pi, Var)):
            out = n
        elif isinstance(n, Add):
            out = _simp_add([go(t) for t in n.terms])
        elif isinstance(n, Mul):
            out = _simp_mul([go(f) for f in n.factors])
        elif isinstance(n, Pow):
            out = pow_(go(n.base), n.exponent)
        elif isinstance(n, Func):
            args = tuple(go(a) for a in n.args)
            folded = _EXACT_FOLDS.get((n.name, args[0])) if len(args) == 1 else None
            if folded is not None:
                out = folded
            elif n.name == "sqrt" and isinstance(args[0], Num):
                out = _fold_sqrt(args[0])
            else:
                out = func(n.name, *args)
        else:
            raise ExprError(f"cannot simplify {n!r}")
        memo[id(n)] = out
        return out

    return go(e)


def _fold_sqrt(n: Num) -> Expr:
    v = n.value
    if v < 0:
        raise ExprError("square root of negative constant")
    rn, rd = _isqrt_exact(v.numerator), _isqrt_exact(v.denominator)
    if rn is not None and rd is not None:
        return Num(Fraction(rn, rd))
    return Func("sqrt", (n,))


def _isqrt_exact(k: int):
    import math
    r = math.isqrt(k)
    return r if r * r == k else None


def _simp_add(terms: list) -> Expr:
    const = Fraction(0)
    coeffs: dict = {}
    order: list = []
    # worklist so rational coefficients distribute over nested sums,
    # letting a - (b + c) cancel against later b and c terms
    stack = [(Fraction(1), t) for t in reversed(terms)]
    while stack:
        c0, t = stack.pop()
        c, core = _split_coeff(t)
        c *= c0
        if core is None:
            const += c
            continue
        if isinstance(core, Add):
            stack.extend((c, s) for s in reversed(core.terms))
            continue
        if core not in coeffs:
            coeffs[core] = Fraction(0)
            order.append(core)
        coeffs[core] += c
    order.sort(key=_sort_key)
    out = []
    for core in order:
        c = coeffs[core]
        if c == 0:
            continue
        out.append(core if c == 1 else mul(Num(c), core))
    if const != 0:
        out.append(Num(const))
    return add(*out) if out else ZERO


def _simp_mul(factors: list) -> Expr:
    coeff = Fraction(1)
    exps: dict = {}
    order: list = []
    flat: list = []
    for f in factors:
        if isinstance(f, Mul):
            flat.extend(f.factors)
        else:
            flat.append(f)
    for f in flat:
        if isinstance(f, Num):
            coeff *= f.value
            continue
        if isinstance(f, Pow) and isinstance(f.base, Mul):
            # (a*b)^n joins the factor pool as a^n * b^n so reciprocals of
            # products cancel against their factors
            flat.extend(pow_(g, f.exponent) for g in f.base.factors)
            continue
        if isinstance(f, Pow):
            base, n = f.base, f.exponent
        else:
            base, n = f, 1
        if base not in exps:
            exps[base] = 0
            order.append(base)
        exps[base] += n
    if coeff == 0:
        return ZERO
    order.sort(key=_sort_key)
    out = []
    for base in order:
        n = exps[base]
        if n == 0:
            continue
        out.append(pow_(base, n))
    return mul(Num(coeff), *out)


# ---------------------------------------------------------------------------
# printing; output is always reparseable and stable under print->parse->print

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 10, 20, 25, 30, 40


def _num_str(v: Fraction) -> tuple:
    if v.denominator == 1:
        s = str(v.numerator)
        return s, (_PREC_UNARY if v < 0 else _PREC_ATOM)
    return f"{v.numerator}/{v.denominator}", _PREC_MUL


def _render(e: Expr) -> tuple:
    """Return (text, precedence of outermost operator)."""
    if isinstance(e, Num):
        return _num_str(e.value)
    if isinstance(e, _Pi):
        return "pi", _PREC_ATOM
    if isinstance(e, Var):
        return e.name, _PREC_ATOM
    if isinstance(e, Func):
        inner = ", ".join(_render(a)[0] for a in e.args)
        return f"{e.name}({inner})", _PREC_ATOM
    if isinstance(e, Pow):
        if e.exponent < 0:
            if e.exponent == -1:
                body = _paren(e.base, _PREC_POW)
            else:
                body = _render_pow(e.base, -e.exponent)
            return f"1/{body}", _PREC_MUL
        return _render_pow(e.base, e.exponent), _PREC_POW
    if isinstance(e, Mul):
        return _render_mul(e)
    if isinstance(e, Add):
        return _render_add(e)
    raise ExprError(f"cannot print {e!r}")


def _paren(e: Expr, min_prec: int) -> str:
    s, p = _render(e)
    return f"({s})" if p < min_prec else s


def _render_pow(base: Expr, n: int) -> str:
    return f"{_paren(base, _PREC_ATOM)}^{n}"


def _render_mul(e: Mul) -> tuple:
    nums, dens = [], []
    for f in e.factors:
        if isinstance(f, Pow) and f.exponent < 0:
            dens.append(pow_(f.base, -f.exponent))
        else:
            nums.append(f)
    if not nums:
        top = "1"
    else:
        top = "*".join(_paren(f, _PREC_MUL + 1) if not isinstance(f, Num)
                       else _paren(f, _PREC_MUL) for f in nums)
    if not dens:
        return top, _PREC_MUL
    if len(dens) == 1:
        bottom = _paren(dens[0], _PREC_POW)
    else:
        bottom = "(" + "*".join(_paren(f, _PREC_MUL + 1) for f in dens) + ")"
    return f"{top}/{bottom}", _PREC_MUL


def _term_sign(t: Expr) -> tuple:
    """(sign, absolute-value term) for subtraction-style printing."""
    if isinstance(t, Num) and t.value < 0:
        return -1, Num(-t.value)
    if isinstance(t, Mul) and isinstance(t.factors[0], Num) \
            and t.factors[0].value < 0:
        return -1, mul(Num(-t.factors[0].value), *t.factors[1:])
    return 1, t


def _render_add(e: Add) -> tuple:
    parts = []
    for i, t in enumerate(e.terms):
        sign, mag = _term_sign(t)
        body = _paren(mag, _PREC_ADD + 1)
        if i == 0:
            parts.append(body if sign > 0 else f"-{body}")
        else:
            parts.append((" + " if sign > 0 else " - ") + body)
    return "".join(parts), _PREC_ADD


def to_string(e: Expr) -> str:
    """Render e in the surface syntax accepted by the parser."""
    return _render(e)[0]


# ---------------------------------------------------------------------------
# evaluation: vectorized over sample points, iterative so tree depth is free

_NP_FUNCS = {
    "exp": np.exp,
    "ln": np.log,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "atan": np.arctan,
    "atan2": np.arctan2,
}


def _bad_point(env: Mapping[str, np.ndarray], mask: np.ndarray):
    idx = int(np.argmax(mask))
    return {k: float(np.broadcast_to(v, mask.shape)[idx]) for k, v in env.items()}


def _check_func_domain(node: Func, vals: Sequence[np.ndarray],
                       env: Mapping[str, np.ndarray]):
    name = node.name
    if name == "ln":
        bad = ~(vals[0] > 0)
        if np.any(bad):
            raise DomainError("ln of non-positive argument", node,
                              _bad_point(env, bad))
    elif name == "sqrt":
        bad = vals[0] < 0
        if np.any(bad):
            raise DomainError("sqrt of negative argument", node,
                              _bad_point(env, bad))
    elif name == "atan2":
        bad = (vals[0] == 0) & (vals[1] == 0)
        if np.any(bad):
            raise DomainError("atan2 at the origin", node, _bad_point(env, bad))


def evaluate_many_multi(exprs: Sequence[Expr],
                        env: Mapping[str, np.ndarray]) -> list:
    """Evaluate several expressions over the same sample arrays.

    Shares one memo table across the batch, so common subtrees (ubiquitous
    after differentiation) are computed once. Raises DomainError on any
    non-finite intermediate rather than letting NaN/inf propagate.
    """
    arrays = {k: np.asarray(v, dtype=float) for k, v in env.items()}
    if arrays:
        npts = len(next(iter(arrays.values())))
    else:
        npts = 1
    memo: dict[int, np.ndarray] = {}

    def children(n: Expr):
        if isinstance(n, Add):
            return n.terms
        if isinstance(n, Mul):
            return n.factors
        if isinstance(n, Pow):
            return (n.base,)
        if isinstance(n, Func):
            return n.args
        return ()

    def compute(n: Expr) -> np.ndarray:
        if isinstance(n, Num):
            return np.float64(n.value)
        if isinstance(n, _Pi):
            return np.float64(np.pi)
        if isinstance(n, Var):
            try:
                return arrays[n.name]
            except KeyError:
                raise DomainError(f"unbound coordinate '{n.name}'", n) from None
        kids = [memo[id(c)] for c in children(n)]
        if isinstance(n, Add):
            out = kids[0]
            for k in kids[1:]:
                out = out + k
        elif isinstance(n, Mul):
            out = kids[0]
            for k in kids[1:]:
                out = out * k
        elif isinstance(n, Pow):
            if n.exponent < 0:
                bad = kids[0] == 0
                if np.any(bad):
                    raise DomainError("division by zero", n,
                                      _bad_point(arrays, np.broadcast_to(bad, (npts,))))
            out = kids[0] ** float(n.exponent)
        else:
            _check_func_domain(n, kids, arrays)
            out = _NP_FUNCS[n.name](*kids)
        finite = np.isfinite(out)
        if not np.all(finite):
            raise DomainError("non-finite value", n,
                              _bad_point(arrays, np.broadcast_to(~finite, (npts,))))
        return out

    with np.errstate(all="ignore"):
        for root in exprs:
            stack = [root]
            while stack:
                n = stack.pop()
                if id(n) in memo:
                    continue
                pending = [c for c in children(n) if id(c) not in memo]
                if pending:
                    stack.append(n)
                    stack.extend(pending)
                else:
                    memo[id(n)] = compute(n)
    return [np.broadcast_to(memo[id(r)], (npts,)).astype(float, copy=True)
            for r in exprs]


def evaluate_many(e: Expr, env: Mapping[str, np.ndarray]) -> np.ndarray:
    """Evaluate e at every point of the coordinate arrays in env."""
    return evaluate_many_multi([e], env)[0]


def evaluate(e: Expr, point: Mapping[str, float]) -> float:
    """Evaluate e at a single point given as {coordinate: value}."""
    env = {k: np.asarray([float(v)]) for k, v in point.items()}
    return float(evaluate_many(e, env)[0])


def evaluate_exact(e: Expr, point: Mapping[str, Fraction]) -> Fraction:
    """Evaluate a rational expression at a rational point, exactly.

    Only Num/Var/Add/Mul/Pow nodes are allowed; pi and the analytic
    functions have no rational values to offer. Used by probes that certify
    identities whose float cancellation error would exceed the tolerance.
    """
    memo: dict[int, Fraction] = {}
    stack = [e]
    while stack:
        n = stack.pop()
        if id(n) in memo:
            continue
        if isinstance(n, Num):
            memo[id(n)] = n.value
            continue
        if isinstance(n, Var):
            try:
                memo[id(n)] = Fraction(point[n.name])
            except KeyError:
                raise DomainError(f"unbound coordinate '{n.name}'", n) from None
            continue
        if isinstance(n, Add):
            kids = n.terms
        elif isinstance(n, Mul):
            kids = n.factors
        elif isinstance(n, Pow):
            kids = (n.base,)
        else:
            raise ExprError(
                f"exact evaluation is rational-only, cannot handle "
                f"'{to_string(n)}'")
        pending = [c for c in kids if id(c) not in memo]
        if pending:
            stack.append(n)
            stack.extend(pending)
            continue
        vals = [memo[id(c)] for c in kids]
        if isinstance(n, Add):
            acc = Fraction(0)
            for v in vals:
                acc += v
            memo[id(n)] = acc
        elif isinstance(n, Mul):
            acc = Fraction(1)
            for v in vals:
                acc *= v
            memo[id(n)] = acc
        else:
            if vals[0] == 0 and n.exponent < 0:
                raise DomainError("division by zero", n,
                                  {k: float(v) for k, v in point.items()})
            memo[id(n)] = vals[0] ** n.exponent
    return memo[id(e)]
