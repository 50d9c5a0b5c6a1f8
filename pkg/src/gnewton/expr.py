"""Expression trees for user-defined systems.

Grammar (one equation per line, ``f<i> = <expr>``):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?          # right-associative
    atom   := NUMBER | VARIABLE | FUNC '(' expr ')' | '(' expr ')'

Variables are x1..xn; functions are exp, sinh, cosh, tan, ln.  ``#``
starts a comment.  Evaluation maps domain errors (log of a non-positive
number, overflow, division by zero) to non-finite floats rather than
raising, so solver sweeps never abort.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import ArityError, ParseError, UnknownIdentifier

Node = Union["Num", "Var", "Neg", "Bin", "Call"]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    arg: Node


@dataclass(frozen=True)
class Bin:
    op: str  # + - * / ^
    left: Node
    right: Node


@dataclass(frozen=True)
class Call:
    fn: str
    arg: Node


def _exp(t):
    try:
        return cmath.exp(t) if isinstance(t, complex) else math.exp(t)
    except OverflowError:
        return math.inf


def _sinh(t):
    try:
        return cmath.sinh(t) if isinstance(t, complex) else math.sinh(t)
    except OverflowError:
        return math.copysign(math.inf, t.real if isinstance(t, complex) else t)


def _cosh(t):
    try:
        return cmath.cosh(t) if isinstance(t, complex) else math.cosh(t)
    except OverflowError:
        return math.inf


def _tan(t):
    return cmath.tan(t) if isinstance(t, complex) else math.tan(t)


def _ln(t):
    if isinstance(t, complex):
        return cmath.log(t) if t != 0 else math.nan
    if t > 0.0:
        return math.log(t)
    return math.nan


FUNCTIONS = {"exp": _exp, "sinh": _sinh, "cosh": _cosh, "tan": _tan, "ln": _ln}

_VAR_RE = re.compile(r"^x([0-9]+)$")


def evaluate(node: Node, x: Sequence[float]):
    """Evaluate the tree at x (1-based variables); non-finite on domain errors."""
    kind = type(node)
    if kind is Num:
        return node.value
    if kind is Var:
        return x[node.index - 1]
    if kind is Neg:
        return -evaluate(node.arg, x)
    if kind is Call:
        return FUNCTIONS[node.fn](evaluate(node.arg, x))
    a = evaluate(node.left, x)
    b = evaluate(node.right, x)
    op = node.op
    try:
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return a / b
        # a ** b: negative base with fractional exponent would go complex
        r = a ** b
        if isinstance(r, complex) and not isinstance(a, complex) and not isinstance(b, complex):
            return math.nan
        return r
    except ZeroDivisionError:
        return math.inf if (a != 0) else math.nan
    except OverflowError:
        return math.inf
    except ValueError:
        return math.nan


def differentiate(node: Node, wrt: int) -> Node:
    """Symbolic partial derivative with respect to x<wrt> (1-based)."""
    kind = type(node)
    if kind is Num:
        return Num(0.0)
    if kind is Var:
        return Num(1.0 if node.index == wrt else 0.0)
    if kind is Neg:
        return _neg(differentiate(node.arg, wrt))
    if kind is Call:
        u = node.arg
        du = differentiate(u, wrt)
        if node.fn == "exp":
            outer = Call("exp", u)
        elif node.fn == "sinh":
            outer = Call("cosh", u)
        elif node.fn == "cosh":
            outer = Call("sinh", u)
        elif node.fn == "tan":
            outer = _add(Num(1.0), _mul(Call("tan", u), Call("tan", u)))
        else:  # ln
            return _div(du, u)
        return _mul(outer, du)
    u, v = node.left, node.right
    du = differentiate(u, wrt)
    dv = differentiate(v, wrt)
    op = node.op
    if op == "+":
        return _add(du, dv)
    if op == "-":
        return _sub(du, dv)
    if op == "*":
        return _add(_mul(du, v), _mul(u, dv))
    if op == "/":
        return _div(_sub(_mul(du, v), _mul(u, dv)), _mul(v, v))
    # power rule; general form only when the exponent involves variables
    if isinstance(v, Num):
        return _mul(_mul(v, _pow(u, Num(v.value - 1.0))), du)
    return _mul(_pow(u, v), _add(_mul(dv, Call("ln", u)), _div(_mul(v, du), u)))


def _is_const(node: Node, value: float) -> bool:
    return isinstance(node, Num) and node.value == value


def _add(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    return Bin("+", a, b)


def _sub(a: Node, b: Node) -> Node:
    if _is_const(b, 0.0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    if _is_const(a, 0.0):
        return _neg(b)
    return Bin("-", a, b)


def _neg(a: Node) -> Node:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _mul(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Num(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    return Bin("*", a, b)


def _div(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0):
        return Num(0.0)
    if _is_const(b, 1.0):
        return a
    return Bin("/", a, b)


def _pow(a: Node, b: Node) -> Node:
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0):
        return Num(1.0)
    return Bin("^", a, b)


def pretty(node: Node) -> str:
    """Parenthesized text form; reparses to an equivalent tree."""
    kind = type(node)
    if kind is Num:
        v = node.value
        if v < 0:
            return f"({v!r})"
        return repr(v)
    if kind is Var:
        return f"x{node.index}"
    if kind is Neg:
        return f"(-{pretty(node.arg)})"
    if kind is Call:
        return f"{node.fn}({pretty(node.arg)})"
    return f"({pretty(node.left)} {node.op} {pretty(node.right)})"


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


class _Parser:
    def __init__(self, text: str, n: int, line_no: int, col_base: int):
        self.n = n
        self.line_no = line_no
        self.tokens = []  # (kind, value, column)
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                col = col_base + pos + (len(text[pos:]) - len(stripped))
                raise ParseError(f"unexpected character {stripped[0]!r}", line_no, col + 1)
            col = col_base + m.start(m.lastgroup)
            self.tokens.append((m.lastgroup, m.group(m.lastgroup), col + 1))
            pos = m.end()
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None, -1)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def fail(self, message, column=None):
        if column is None:
            column = self.peek()[2]
            if column < 0:
                column = self.tokens[-1][2] + len(str(self.tokens[-1][1])) if self.tokens else 1
        raise ParseError(message, self.line_no, column)

    def expect(self, op):
        kind, val, col = self.take()
        if kind != "op" or val != op:
            self.fail(f"expected {op!r}", col if col > 0 else None)

    def parse(self) -> Node:
        node = self.expr()
        kind, val, col = self.peek()
        if kind is not None:
            if val == ",":
                raise ArityError(f"line {self.line_no}: functions take exactly one argument")
            self.fail(f"unexpected token {val!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                node = Bin(val, node, rhs)
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.factor()
                node = Bin(val, node, rhs)
            else:
                return node

    def factor(self) -> Node:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            return Bin("^", base, self.factor())
        return base

    def atom(self) -> Node:
        kind, val, col = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            m = _VAR_RE.match(val)
            if m:
                idx = int(m.group(1))
                if not 1 <= idx <= self.n:
                    raise UnknownIdentifier(
                        f"line {self.line_no}: variable {val} outside x1..x{self.n}")
                return Var(idx)
            if val in FUNCTIONS:
                nxt_kind, nxt_val, _ = self.peek()
                if nxt_kind != "op" or nxt_val != "(":
                    self.fail(f"expected '(' after {val}")
                self.take()
                arg = self.expr()
                kind2, val2, _ = self.peek()
                if kind2 == "op" and val2 == ",":
                    raise ArityError(f"line {self.line_no}: {val} takes exactly one argument")
                self.expect(")")
                return Call(val, arg)
            raise UnknownIdentifier(f"line {self.line_no}: unknown identifier {val!r}")
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind is None:
            self.fail("unexpected end of expression")
        self.fail(f"unexpected token {val!r}", col)


_EQN_RE = re.compile(r"^\s*f([0-9]+)\s*=\s*(.*)$")


def parse_equations(text: str, n: int) -> tuple:
    """Parse ``f<i> = expr`` lines into a tuple of n trees (index order).

    Every index 1..n must appear exactly once; '#' starts a comment.
    """
    if n < 1:
        raise ParseError("system dimension must be at least 1", 1, 1)
    seen = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _EQN_RE.match(line)
        if not m:
            raise ParseError("expected 'f<i> = <expr>'", line_no, 1)
        idx = int(m.group(1))
        if not 1 <= idx <= n:
            raise ParseError(f"equation index f{idx} outside 1..{n}", line_no, 1)
        if idx in seen:
            raise ParseError(f"duplicate equation f{idx}", line_no, 1)
        body = m.group(2)
        if not body.strip():
            raise ParseError(f"empty right-hand side for f{idx}", line_no, len(line))
        col_base = len(raw) - len(body)
        seen[idx] = _Parser(body, n, line_no, col_base).parse()
    missing = [i for i in range(1, n + 1) if i not in seen]
    if missing:
        raise ParseError(f"missing equations: {', '.join('f%d' % i for i in missing)}",
                         len(text.splitlines()) or 1, 1)
    return tuple(seen[i] for i in range(1, n + 1))
