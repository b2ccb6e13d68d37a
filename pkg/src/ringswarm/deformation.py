"""Parametric deformation functions: a tiny expression language plus presets.

The two deformation functions omega_x(phi) and omega_y(phi) arrive as text
(from scenario files or the CLI) and are parsed once into an immutable AST.

Grammar (EBNF):

    expr     = term { ("+" | "-") term } ;
    term     = factor { ("*" | "/") factor } ;
    factor   = "-" factor | power ;
    power    = atom [ "^" exponent ] ;
    exponent = integer [ "^" exponent ] ;          (* right-associative *)
    atom     = number | "phi" | "s"
             | ("sin" | "cos") "(" expr ")"
             | "(" expr ")" ;

Precedence: ^  >  unary -  >  * /  >  + -.  The exponent of "^" must be a
non-negative integer literal (chains like 2^3 fold at parse time).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

_VARIABLES = ("phi", "s")
_FUNCTIONS = ("sin", "cos")
_MAX_EXPONENT = 1_000_000


class ExprError(ValueError):
    """Base for expression parse errors; carries the source position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ExprSyntaxError(ExprError):
    pass


class UnknownIdentifier(ExprError):
    def __init__(self, name: str, position: int):
        super().__init__(f"unknown identifier {name!r}", position)
        self.name = name


class EvaluationError(ArithmeticError):
    """Expression produced a non-finite value (division by zero, overflow)."""


class UnknownPreset(KeyError):
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str  # "phi" or "s"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int  # non-negative integer literal


@dataclass(frozen=True)
class Call:
    func: str  # "sin" or "cos"
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Pow, Call]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)|(?P<ident>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            # Skip trailing whitespace gracefully.
            if text[pos:].strip() == "":
                break
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, text, pos = self.take()
        if kind != "op" or text != op:
            raise ExprSyntaxError(f"expected {op!r}, found {text or 'end of input'!r}", pos)

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {text!r}", pos)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                left = BinOp(text, left, self.term())
            else:
                return left

    def term(self) -> Expr:
        left = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.take()
                left = BinOp(text, left, self.factor())
            else:
                return left

    def factor(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.take()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        kind, text, pos = self.take()
        if kind != "num" or "." in text:
            raise ExprSyntaxError("exponent must be a non-negative integer literal", pos)
        value = int(text)
        kind, nxt, _ = self.peek()
        if kind == "op" and nxt == "^":
            self.take()
            value = value ** self.exponent()
        if value > _MAX_EXPONENT:
            raise ExprSyntaxError(f"exponent {value} too large", pos)
        return value

    def atom(self) -> Expr:
        kind, text, pos = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            if text in _FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            if text in _VARIABLES:
                return Var(text)
            raise UnknownIdentifier(text, pos)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ExprSyntaxError(f"unexpected {text or 'end of input'!r}", pos)


def parse(text: str) -> Expr:
    """Parse an expression over variables phi and s into an AST."""
    return _Parser(text).parse()


def evaluate(e: Expr, phi: float, s: float) -> float:
    """Evaluate an expression; non-finite results raise EvaluationError."""
    try:
        v = _eval(e, phi, s)
    except ZeroDivisionError:
        raise EvaluationError("division by zero") from None
    except OverflowError:
        raise EvaluationError("overflow") from None
    if not math.isfinite(v):
        raise EvaluationError(f"non-finite result {v!r}")
    return v


def _eval(e: Expr, phi: float, s: float) -> float:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return phi if e.name == "phi" else s
    if isinstance(e, Neg):
        return -_eval(e.arg, phi, s)
    if isinstance(e, BinOp):
        a = _eval(e.left, phi, s)
        b = _eval(e.right, phi, s)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        return a / b
    if isinstance(e, Pow):
        return _eval(e.base, phi, s) ** e.exponent
    if isinstance(e, Call):
        v = _eval(e.arg, phi, s)
        return math.sin(v) if e.func == "sin" else math.cos(v)
    raise TypeError(f"not an expression node: {e!r}")


# Printing: minimal parentheses, chosen so parse(to_text(parse(x))) is
# structurally identical to parse(x).

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC_ADD if e.op in "+-" else _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM


def to_text(e: Expr) -> str:
    """Render an AST back to parseable text."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    if isinstance(e, Neg):
        inner = to_text(e.arg)
        if _prec(e.arg) < _PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Pow):
        base = to_text(e.base)
        if _prec(e.base) < _PREC_ATOM:
            base = f"({base})"
        return f"{base}^{e.exponent}"
    if isinstance(e, BinOp):
        p = _prec(e)
        left = to_text(e.left)
        if _prec(e.left) < p:
            left = f"({left})"
        right = to_text(e.right)
        # Left-associative: a right child at equal precedence reparses onto
        # the left without parens, changing the tree.
        if _prec(e.right) <= p:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression node: {e!r}")


@dataclass(frozen=True)
class DeformationSpec:
    """Parsed deformation pair plus the distortion factor s.

    omega_zd is optional metadata (the nominal spin rate a preset was drawn
    with); the scenario's embedding config is authoritative at run time.
    """

    omega_x: Expr
    omega_y: Expr
    s: float
    omega_zd: float | None = None

    def rates(self, phi: float) -> tuple[float, float]:
        return (
            evaluate(self.omega_x, phi, self.s),
            evaluate(self.omega_y, phi, self.s),
        )

    def check_finite(self, samples: int = 256) -> None:
        """Evaluate both expressions on a phi grid; raises EvaluationError."""
        for k in range(samples):
            self.rates(2.0 * math.pi * k / samples)


# name -> (omega_x, omega_y, s, nominal spin rate, description)
_SHAPE_PRESETS: dict[str, tuple[str, str, float, float, str]] = {
    "fig1a": (
        "s*sin(6*phi)*cos(6*phi)",
        "s",
        0.3,
        0.8,
        "six-lobed ripple, tilted",
    ),
    "fig1b": (
        "s*sin(phi)*cos(phi)",
        "0",
        1.0,
        2.0,
        "dumbbell profile in the YZ plane",
    ),
    "fig1c": (
        "s*cos(2*phi)",
        "s*cos(phi)^2",
        0.6,
        0.5,
        "two-lobed fold",
    ),
    "fig1d": (
        "s*cos(3*phi)*sin(phi)",
        "0.5*s",
        0.9,
        1.8,
        "three-lobed twist, tilted",
    ),
    "eq23": (
        "s*(cos(phi)*sin(phi) - sin(phi)^3)",
        "s*cos(phi)^2*sin(-phi)",
        0.4,
        1.5,
        "saddle-like warp used by the bundled swarm scenarios",
    ),
}


def preset(name: str) -> DeformationSpec:
    """Return a bundled deformation shape by name."""
    try:
        ox, oy, s, omega_zd, _ = _SHAPE_PRESETS[name]
    except KeyError:
        raise UnknownPreset(name) from None
    return DeformationSpec(parse(ox), parse(oy), s, omega_zd)


def preset_names() -> list[str]:
    return list(_SHAPE_PRESETS)


def preset_info(name: str) -> dict:
    try:
        ox, oy, s, omega_zd, desc = _SHAPE_PRESETS[name]
    except KeyError:
        raise UnknownPreset(name) from None
    return {
        "name": name,
        "omega_x": ox,
        "omega_y": oy,
        "s": s,
        "omega_zd": omega_zd,
        "description": desc,
    }
