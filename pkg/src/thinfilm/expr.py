"""Recursive-descent parser for scalar test-function expressions.

Grammar (EBNF)::

    expr   = term { ("+" | "-") term } ;
    term   = unary { ("*" | "/") unary } ;
    unary  = ("+" | "-") unary | power ;
    power  = atom [ "^" unary ] ;
    atom   = number | "x" digits | "pi" | func "(" expr ")" | "(" expr ")" ;
    func   = "sin" | "cos" | "exp" ;

``+ - * /`` associate to the left, ``^`` to the right and binds tighter than
unary minus, so ``-x1^2`` is ``-(x1^2)``.  Variables are 1-based: ``x1 .. xd``.

Evaluation is vectorised over an (n, d) array of points and optionally carries
forward-mode derivatives, so every parsed expression has an exact gradient.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, UnknownVariable

FUNCS = {"sin", "cos", "exp"}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    arg: object


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, d: int):
        self.text = text
        self.d = d
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            found = "end of input" if kind == "eof" else repr(val)
            raise ParseError(f"expected {value!r}, found {found}", pos)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected token {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Bin(op, node, self.unary())
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("+", "-"):
            self.take()
            arg = self.unary()
            return Neg(arg) if val == "-" else arg
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Bin("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val in FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            if val == "pi":
                return Num(math.pi)
            m = re.fullmatch(r"x(\d+)", val)
            if m is None:
                raise UnknownVariable(f"unknown identifier {val!r}", pos)
            idx = int(m.group(1))
            if not 1 <= idx <= self.d:
                raise UnknownVariable(f"variable {val!r} outside x1..x{self.d}", pos)
            return Var(idx - 1)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "eof" else repr(val)
        raise ParseError(f"expected operand, found {found}", pos)


def parse(text: str, d: int):
    """Parse ``text`` into an expression tree over ``x1..xd``."""
    return _Parser(text, d).parse()


def variables(node) -> set[int]:
    if isinstance(node, Var):
        return {node.index}
    if isinstance(node, Num):
        return set()
    if isinstance(node, (Neg, Call)):
        return variables(node.arg)
    return variables(node.left) | variables(node.right)


def linear_form(node, d: int):
    """Return (coeffs, const) if the tree is affine in the variables, else None."""
    if isinstance(node, Num):
        return np.zeros(d), node.value
    if isinstance(node, Var):
        c = np.zeros(d)
        c[node.index] = 1.0
        return c, 0.0
    if isinstance(node, Neg):
        sub = linear_form(node.arg, d)
        return None if sub is None else (-sub[0], -sub[1])
    if isinstance(node, Call):
        if variables(node):
            return None
        return np.zeros(d), float(evaluate(node, np.zeros((1, d)))[0][0])
    left, right = linear_form(node.left, d), linear_form(node.right, d)
    if left is None or right is None:
        return None
    (cl, kl), (cr, kr) = left, right
    if node.op == "+":
        return cl + cr, kl + kr
    if node.op == "-":
        return cl - cr, kl - kr
    if node.op == "*":
        if not cl.any():
            return kl * cr, kl * kr
        if not cr.any():
            return kr * cl, kr * kl
        return None
    if node.op == "/":
        if not cr.any() and kr != 0.0:
            return cl / kr, kl / kr
        return None
    if node.op == "^" and not cl.any() and not cr.any():
        return np.zeros(d), kl**kr
    return None


def evaluate(node, X: np.ndarray, grad: bool = False):
    """Evaluate at rows of ``X``; returns (values, gradients or None)."""
    n, d = X.shape

    def zeros():
        return np.zeros((n, d)) if grad else None

    def rec(nd):
        if isinstance(nd, Num):
            return np.full(n, nd.value), zeros()
        if isinstance(nd, Var):
            g = None
            if grad:
                g = np.zeros((n, d))
                g[:, nd.index] = 1.0
            return X[:, nd.index].astype(float), g
        if isinstance(nd, Neg):
            v, g = rec(nd.arg)
            return -v, (None if g is None else -g)
        if isinstance(nd, Call):
            v, g = rec(nd.arg)
            if nd.name == "sin":
                out, der = np.sin(v), np.cos(v)
            elif nd.name == "cos":
                out, der = np.cos(v), -np.sin(v)
            else:
                out = np.exp(v)
                der = out
            return out, (None if g is None else der[:, None] * g)
        a, ga = rec(nd.left)
        b, gb = rec(nd.right)
        op = nd.op
        if op == "+":
            return a + b, (None if not grad else ga + gb)
        if op == "-":
            return a - b, (None if not grad else ga - gb)
        if op == "*":
            return a * b, (None if not grad else ga * b[:, None] + gb * a[:, None])
        if op == "/":
            out = a / b
            return out, (None if not grad else (ga - gb * out[:, None]) / b[:, None])
        out = np.power(a, b)
        if not grad:
            return out, None
        const_exp = not variables(nd.right)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = ga * (b * np.power(a, b - 1.0))[:, None]
            if not const_exp:
                g = g + gb * (out * np.log(a))[:, None]
        return out, g

    return rec(node)
