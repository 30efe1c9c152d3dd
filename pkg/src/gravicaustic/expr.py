"""Infix expressions in one variable ``x``.

Grammar, loosest binding first::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := primary ('^' unary)?          # right-associative
    primary := NUMBER | 'x' | FUNC '(' expr ')' | '(' expr ')'

so ``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^(3^2)``.  FUNC is one of
``sin cos tan sqrt abs exp ln sinh cosh tanh``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import numerics
from .errors import (
    MirrorEvaluationError,
    MirrorLexError,
    MirrorParseError,
    NonDifferentiableError,
    UnknownIdentifierError,
)
from .numerics import Dual

# -- AST ----------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]

# -- lexer --------------------------------------------------------------------

_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_PUNCT = set("+-*/^()")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            m = _NUMBER.match(text, i)
            tokens.append(Token("num", m.group(0), i))
            i = m.end()
        elif c.isalpha() or c == "_":
            m = _IDENT.match(text, i)
            tokens.append(Token("ident", m.group(0), i))
            i = m.end()
        elif c in _PUNCT:
            tokens.append(Token("op", c, i))
            i += 1
        else:
            raise MirrorLexError(c, i)
    tokens.append(Token("end", "", n))
    return tokens


# -- parser -------------------------------------------------------------------

_PRIMARY_START = frozenset({"number", "x", "function", "'('"})


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, expected) -> MirrorParseError:
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        return MirrorParseError(found, expected, t.pos)

    def expect_op(self, op: str):
        if self.tok.kind == "op" and self.tok.text == op:
            return self.advance()
        raise self.fail({repr(op)})

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise self.fail({"operator", "end of input"})
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        if self.tok.kind == "op" and self.tok.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.primary()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def primary(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "ident":
            if t.text == "x":
                self.advance()
                return Var()
            if t.text not in numerics.FUNCTIONS:
                raise UnknownIdentifierError(t.text, t.pos)
            self.advance()
            self.expect_op("(")
            arg = self.expr()
            self.expect_op(")")
            return Call(t.text, arg)
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        raise self.fail(_PRIMARY_START | {"'+'", "'-'"})


def parse_expression(text: str) -> Node:
    return _Parser(text).parse()


# -- printer ------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_UNARY = 3
_ATOM = 5


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _UNARY
    if isinstance(node, Num) and (node.value < 0 or math.copysign(1, node.value) < 0):
        return _UNARY
    return _ATOM


def to_text(node: Node) -> str:
    """Render ``node`` so that parsing the text rebuilds the same tree."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        return f"-{_wrap(inner, _prec(node.operand) < _UNARY)}"
    p = _PREC[node.op]
    left, right = to_text(node.left), to_text(node.right)
    if node.op == "^":
        return f"{_wrap(left, _prec(node.left) <= p)}^{_wrap(right, _prec(node.right) < _UNARY)}"
    return f"{_wrap(left, _prec(node.left) < p)} {node.op} {_wrap(right, _prec(node.right) <= p)}"


def _wrap(s: str, cond: bool) -> str:
    return f"({s})" if cond else s


# -- evaluation ---------------------------------------------------------------


def _power(a, b):
    if isinstance(a, Dual) or isinstance(b, Dual):
        return a**b
    return numerics._pow(a, b)


def _eval(node: Node, x):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval(node.operand, x)
    if isinstance(node, Call):
        return numerics.FUNCTIONS[node.func](_eval(node.arg, x))
    a = _eval(node.left, x)
    b = _eval(node.right, x)
    op = node.op
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if isinstance(b, np.ndarray):
            if np.any(b == 0):
                raise ZeroDivisionError("division by zero")
        elif not isinstance(b, Dual) and b == 0:
            raise ZeroDivisionError("division by zero")
        return a / b
    return _power(a, b)


def evaluate(node: Node, x):
    """Evaluate ``node`` at ``x`` (float, ``Dual`` or numpy array).

    Domain faults (``ln`` of a negative, division by zero, overflow, a
    non-finite result) raise :class:`MirrorEvaluationError`.
    """
    try:
        out = _eval(node, x)
    except NonDifferentiableError:
        raise NonDifferentiableError(_loc(x), "non-differentiable point (abs at 0)") from None
    except (ValueError, ZeroDivisionError, OverflowError, FloatingPointError) as exc:
        raise MirrorEvaluationError(f"cannot evaluate {to_text(node)!r}: {exc}", _loc(x)) from None
    if not np.all(np.isfinite(numerics._real(out))):
        raise MirrorEvaluationError(f"non-finite value of {to_text(node)!r}", _loc(x))
    return out


def _loc(x):
    r = numerics._real(x)
    if isinstance(r, np.ndarray):
        return None
    return float(r)
