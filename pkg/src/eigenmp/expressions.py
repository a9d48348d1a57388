"""Tiny coefficient-expression grammar with built-in first derivatives.

Grammar (hand-written recursive descent):

    expr    := term (('+' | '-') term)*
    term    := unary ('*' unary)*
    unary   := '-' unary | postfix
    postfix := atom ('^' number)?
    atom    := number | 'x' | 'y' | '(' expr ')'
             | 'sqrt' '(' expr ')' | 'exp' '(' expr ')' | 'abs' '(' expr ')'

Exponents are numeric literals.  Every node evaluates to (value, d/dx, d/dy)
arrays, which is all the certificate and boundary machinery needs from
configured coefficients.
"""

from __future__ import annotations

import re

import numpy as np


class ExpressionError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+)|(sqrt|exp|abs|x|y)|(.))")


def _tokenize(src):
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            break
        num, word, sym = m.groups()
        if num is not None:
            out.append(("num", float(num)))
        elif word is not None:
            out.append(("word", word))
        elif sym.strip():
            if sym not in "+-*^()":
                raise ExpressionError("unexpected character %r in %r" % (sym, src))
            out.append(("sym", sym))
        pos = m.end()
    out.append(("end", None))
    return out


class Expr:
    """Parsed expression; evaluates value and gradient on points."""

    def __init__(self, src, node):
        self.src = src
        self._node = node

    def __repr__(self):
        return "Expr(%r)" % self.src

    def eval_with_grad(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        x = pts[:, 0]
        y = pts[:, 1] if pts.shape[1] > 1 else np.zeros_like(x)
        return _eval(self._node, x, y)

    def value(self, pts):
        return self.eval_with_grad(pts)[0]


def _eval(node, x, y):
    kind = node[0]
    if kind == "const":
        z = np.zeros_like(x)
        return np.full_like(x, node[1]), z, z
    if kind == "x":
        return x, np.ones_like(x), np.zeros_like(x)
    if kind == "y":
        return y, np.zeros_like(x), np.ones_like(x)
    if kind in ("+", "-", "*"):
        a, ax, ay = _eval(node[1], x, y)
        b, bx, by = _eval(node[2], x, y)
        if kind == "+":
            return a + b, ax + bx, ay + by
        if kind == "-":
            return a - b, ax - bx, ay - by
        return a * b, ax * b + a * bx, ay * b + a * by
    if kind == "neg":
        a, ax, ay = _eval(node[1], x, y)
        return -a, -ax, -ay
    if kind == "pow":
        a, ax, ay = _eval(node[1], x, y)
        p = node[2]
        v = np.power(a, p)
        with np.errstate(divide="ignore", invalid="ignore"):
            dv = p * np.power(a, p - 1.0)
        dv = np.where(np.isfinite(dv), dv, 0.0)
        return v, dv * ax, dv * ay
    if kind == "sqrt":
        a, ax, ay = _eval(node[1], x, y)
        v = np.sqrt(a)
        with np.errstate(divide="ignore", invalid="ignore"):
            dv = 0.5 / v
        dv = np.where(np.isfinite(dv), dv, 0.0)
        return v, dv * ax, dv * ay
    if kind == "exp":
        a, ax, ay = _eval(node[1], x, y)
        v = np.exp(a)
        return v, v * ax, v * ay
    if kind == "abs":
        a, ax, ay = _eval(node[1], x, y)
        s = np.sign(a)
        return np.abs(a), s * ax, s * ay
    raise ExpressionError("bad node %r" % (node,))


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect_sym(self, sym):
        kind, val = self.take()
        if kind != "sym" or val != sym:
            raise ExpressionError("expected %r in %r" % (sym, self.src))

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            raise ExpressionError("trailing tokens in %r" % self.src)
        return node

    def expr(self):
        node = self.term()
        while self.peek() == ("sym", "+") or self.peek() == ("sym", "-"):
            _, op = self.take()
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek() == ("sym", "*"):
            self.take()
            node = ("*", node, self.unary())
        return node

    def unary(self):
        if self.peek() == ("sym", "-"):
            self.take()
            return ("neg", self.unary())
        return self.postfix()

    def postfix(self):
        node = self.atom()
        if self.peek() == ("sym", "^"):
            self.take()
            neg = False
            if self.peek() == ("sym", "-"):
                self.take()
                neg = True
            kind, val = self.take()
            if kind != "num":
                raise ExpressionError("exponent must be a number in %r" % self.src)
            node = ("pow", node, -val if neg else val)
        return node

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return ("const", val)
        if kind == "word":
            if val in ("x", "y"):
                return (val,)
            self.expect_sym("(")
            inner = self.expr()
            self.expect_sym(")")
            return (val, inner)
        if kind == "sym" and val == "(":
            inner = self.expr()
            self.expect_sym(")")
            return inner
        raise ExpressionError("unexpected token %r in %r" % (val, self.src))


def parse(src):
    return Expr(src, _Parser(src).parse())
