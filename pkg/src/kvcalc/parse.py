"""Recursive-descent parser for the expression surface syntax.

Grammar (whitespace is insignificant):

    expr      := term (('+' | '-') term)*
    term      := unary (('*' | '/') unary)*
    unary     := '-' unary | power
    power     := atom ['^' exponent]
    exponent  := ['-'] INT | '(' ['-'] INT ')'
    atom      := NUMBER | 'pi' | IDENT | IDENT '(' expr (',' expr)* ')'
                 | '(' expr ')'

Exponents must be integer literals; fractional powers are spelled with
sqrt(). Identifiers must be chart coordinates or known function names.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import TYPE_CHECKING

from .expr import (
    Expr,
    FUNCTION_ARITY,
    PI,
    Num,
    Var,
    add,
    div,
    func,
    mul,
    neg,
    pow_,
    sub,
)

if TYPE_CHECKING:
    from .chart import Chart

__all__ = ["ParseError", "parse", "parse_constraint"]


class ParseError(ValueError):
    """Syntax or name error, annotated with the offending position."""

    def __init__(self, message: str, text: str, pos: int):
        self.pos = pos
        caret = " " * pos + "^"
        super().__init__(f"{message} at position {pos}\n  {text}\n  {caret}")


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
    r"|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),<>]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", text,
                             n - len(stripped))
        if m.group("num") is not None:
            out.append(("num", m.group("num"), m.start("num")))
        elif m.group("name") is not None:
            out.append(("name", m.group("name"), m.start("name")))
        else:
            out.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    out.append(("end", "", n))
    return out


class _Parser:
    def __init__(self, text: str, coords):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.coords = frozenset(coords)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected '{op}'", self.text, pos)

    def at_op(self, *ops) -> bool:
        kind, val, _ = self.peek()
        return kind == "op" and val in ops

    def expr(self) -> Expr:
        out = self.term()
        while self.at_op("+", "-"):
            _, op, _ = self.take()
            rhs = self.term()
            out = add(out, rhs) if op == "+" else sub(out, rhs)
        return out

    def term(self) -> Expr:
        out = self.unary()
        while self.at_op("*", "/"):
            _, op, _ = self.take()
            rhs = self.unary()
            out = mul(out, rhs) if op == "*" else div(out, rhs)
        return out

    def unary(self) -> Expr:
        if self.at_op("-"):
            self.take()
            return neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at_op("^"):
            self.take()
            return pow_(base, self.exponent())
        return base

    def exponent(self) -> int:
        paren = self.at_op("(")
        if paren:
            self.take()
        sign = 1
        if self.at_op("-"):
            self.take()
            sign = -1
        kind, val, pos = self.take()
        if kind != "num":
            raise ParseError("exponent must be an integer literal", self.text, pos)
        f = Fraction(val)
        if f.denominator != 1:
            raise ParseError("exponent must be an integer (use sqrt() for roots)",
                             self.text, pos)
        if paren:
            self.expect_op(")")
        return sign * int(f)

    def atom(self) -> Expr:
        kind, val, pos = self.take()
        if kind == "num":
            return Num(Fraction(val))
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "name":
            if self.at_op("("):
                if val not in FUNCTION_ARITY:
                    raise ParseError(f"unknown function '{val}'", self.text, pos)
                self.take()
                args = [self.expr()]
                while self.at_op(","):
                    self.take()
                    args.append(self.expr())
                self.expect_op(")")
                if len(args) != FUNCTION_ARITY[val]:
                    raise ParseError(
                        f"{val} takes {FUNCTION_ARITY[val]} argument(s), "
                        f"got {len(args)}", self.text, pos)
                return func(val, *args)
            if val == "pi":
                return PI
            if val in FUNCTION_ARITY:
                raise ParseError(f"'{val}' is a function and needs arguments",
                                 self.text, pos)
            if val not in self.coords:
                raise ParseError(f"unknown identifier '{val}'", self.text, pos)
            return Var(val)
        raise ParseError("expected a number, name or '('", self.text, pos)


def parse(text: str, chart: "Chart") -> Expr:
    """Parse text into an expression over the chart's coordinates."""
    p = _Parser(text, chart.coords)
    out = p.expr()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"trailing input {val!r}", text, pos)
    return out


def parse_constraint(text: str, chart: "Chart") -> Expr:
    """Parse a strict inequality 'lhs > rhs' or 'lhs < rhs' into an expression
    that is positive exactly where the constraint holds."""
    p = _Parser(text, chart.coords)
    lhs = p.expr()
    kind, op, pos = p.take()
    if kind != "op" or op not in ("<", ">"):
        raise ParseError("expected '<' or '>'", text, pos)
    rhs = p.expr()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"trailing input {val!r}", text, pos)
    return sub(lhs, rhs) if op == ">" else sub(rhs, lhs)
