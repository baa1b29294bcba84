"""Coefficient expression language: parser, evaluator, printer.

Grammar (EBNF)::

    expr   = term {("+" | "-") term}
    term   = factor {("*" | "/") factor}
    factor = ["-"] power
    power  = atom ["^" factor]
    atom   = number | "t" | "(" expr ")" | "sqrt" "(" expr ")"

``^`` binds tightest and is right-associative; in particular ``-4^t``
means ``-(4^t)``.  Number literals are integers or terminating decimals
and are kept as exact ``Fraction`` values so evaluation is reproducible
at any precision.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import EvaluationError, ExprSyntaxError, NativeOverflowError


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    """The grid variable t."""


@dataclass(frozen=True)
class Neg:
    arg: "CoefficientExpr"


@dataclass(frozen=True)
class Sqrt:
    arg: "CoefficientExpr"


@dataclass(frozen=True)
class Add:
    left: "CoefficientExpr"
    right: "CoefficientExpr"


@dataclass(frozen=True)
class Sub:
    left: "CoefficientExpr"
    right: "CoefficientExpr"


@dataclass(frozen=True)
class Mul:
    left: "CoefficientExpr"
    right: "CoefficientExpr"


@dataclass(frozen=True)
class Div:
    left: "CoefficientExpr"
    right: "CoefficientExpr"


@dataclass(frozen=True)
class Pow:
    base: "CoefficientExpr"
    exponent: "CoefficientExpr"


CoefficientExpr = Num | Var | Neg | Sqrt | Add | Sub | Mul | Div | Pow

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+(?:\.\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            at = pos + len(text[pos:]) - len(text[pos:].lstrip())
            if at >= len(text):
                break  # only trailing whitespace
            raise ExprSyntaxError(f"unexpected character {text[at]!r}", at)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}", pos)
        return self.take()

    def parse(self) -> CoefficientExpr:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {val!r}", pos)
        return node

    def expr(self) -> CoefficientExpr:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                node = Add(node, rhs) if val == "+" else Sub(node, rhs)
            else:
                return node

    def term(self) -> CoefficientExpr:
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.factor()
                node = Mul(node, rhs) if val == "*" else Div(node, rhs)
            else:
                return node

    def factor(self) -> CoefficientExpr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.power())
        return self.power()

    def power(self) -> CoefficientExpr:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            return Pow(base, self.factor())
        return base

    def atom(self) -> CoefficientExpr:
        kind, val, pos = self.take()
        if kind == "number":
            return Num(Fraction(val))
        if kind == "ident":
            if val == "t":
                return Var()
            if val == "sqrt":
                self.expect_op("(")
                inner = self.expr()
                self.expect_op(")")
                return Sqrt(inner)
            raise ExprSyntaxError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ExprSyntaxError(
            f"expected a number, 't', '(' or 'sqrt(' but found {val or 'end of input'!r}",
            pos,
        )


def parse_coefficient_expr(text: str) -> CoefficientExpr:
    """Parse a coefficient formula into its AST."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text).parse()


# Printer precedence levels: higher binds tighter.
_P_ADD, _P_MUL, _P_NEG, _P_POW, _P_ATOM = 1, 2, 3, 4, 5


def _prec(node: CoefficientExpr) -> int:
    if isinstance(node, (Add, Sub)):
        return _P_ADD
    if isinstance(node, (Mul, Div)):
        return _P_MUL
    if isinstance(node, Neg):
        return _P_NEG
    if isinstance(node, Pow):
        return _P_POW
    return _P_ATOM


def _fraction_text(q: Fraction) -> str:
    if q < 0:
        return f"(0 - {_fraction_text(-q)})"
    if q.denominator == 1:
        return str(q.numerator)
    # terminating decimal when the denominator is 2^a * 5^b
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1:
        digits = max(twos, fives)
        scaled = q.numerator * 10**digits // q.denominator
        text = str(scaled).rjust(digits + 1, "0")
        return f"{text[:-digits]}.{text[-digits:]}"
    return f"({q.numerator} / {q.denominator})"


def to_text(node: CoefficientExpr) -> str:
    """Deterministic rendering; re-parses to a structurally equal AST."""

    def wrap(child: CoefficientExpr, minimum: int) -> str:
        text = to_text(child)
        return f"({text})" if _prec(child) < minimum else text

    if isinstance(node, Num):
        return _fraction_text(node.value)
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Sqrt):
        return f"sqrt({to_text(node.arg)})"
    if isinstance(node, Neg):
        return f"-{wrap(node.arg, _P_POW)}"
    if isinstance(node, Pow):
        # exponent is a factor: a bare Neg would re-parse identically, but
        # parenthesizing it is easier to read
        expo = to_text(node.exponent)
        if _prec(node.exponent) < _P_POW:
            expo = f"({expo})"
        return f"{wrap(node.base, _P_ATOM)}^{expo}"
    if isinstance(node, (Mul, Div)):
        op = "*" if isinstance(node, Mul) else "/"
        left = wrap(node.left, _P_MUL)
        right = wrap(node.right, _P_NEG)  # right operand must bind tighter
        return f"{left} {op} {right}"
    if isinstance(node, (Add, Sub)):
        op = "+" if isinstance(node, Add) else "-"
        left = wrap(node.left, _P_ADD)
        right = wrap(node.right, _P_MUL)
        return f"{left} {op} {right}"
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(node: CoefficientExpr, t: int, kernel):
    """Evaluate at integer t to a real kernel scalar.

    A precision context must be active.  Raises EvaluationError for a
    negative sqrt argument, zero division, a sign-invalid power, or (in
    native mode) overflow.
    """
    out = _eval(node, t, kernel)
    if not kernel.isfinite(out):
        message = f"value of {to_text(node)} at t={t} is not finite at this precision"
        if kernel.needs_finite_checks:
            raise NativeOverflowError(message)
        raise EvaluationError(message)
    return out


def _eval(node: CoefficientExpr, t: int, kernel):
    if isinstance(node, Num):
        return kernel.real(node.value)
    if isinstance(node, Var):
        return kernel.real(t)
    if isinstance(node, Neg):
        return -_eval(node.arg, t, kernel)
    if isinstance(node, Sqrt):
        return kernel.sqrt_nonneg(_eval(node.arg, t, kernel))
    if isinstance(node, Add):
        return _eval(node.left, t, kernel) + _eval(node.right, t, kernel)
    if isinstance(node, Sub):
        return _eval(node.left, t, kernel) - _eval(node.right, t, kernel)
    if isinstance(node, Mul):
        return _eval(node.left, t, kernel) * _eval(node.right, t, kernel)
    if isinstance(node, Div):
        den = _eval(node.right, t, kernel)
        if den == 0:
            raise EvaluationError(f"division by zero in {to_text(node)} at t={t}")
        return _eval(node.left, t, kernel) / den
    if isinstance(node, Pow):
        return kernel.pow_real(
            _eval(node.base, t, kernel), _eval(node.exponent, t, kernel)
        )
    raise TypeError(f"not an expression node: {node!r}")
