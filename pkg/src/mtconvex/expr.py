"""Expression language for real functions of one variable.

Grammar, lowest to highest precedence::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" factor)?
    atom   := number | "x" | "pi" | "e" | func "(" expr ")" | "(" expr ")"
    func   := exp | log | sqrt | sin | cos | abs

So ``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^(3^2)``.

Evaluation never raises on domain failures. Any subexpression that leaves
the reals (sqrt of a negative, log of a non-positive, division by zero,
non-integer power of a negative base, overflow) makes the whole value
undefined, represented as NaN.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

import numpy as np

__all__ = [
    "Const", "Var", "Name", "Neg", "Func", "BinOp", "Expr",
    "ParseError", "UnknownIdentifierError", "DomainError",
    "Interval", "FunctionSpec", "UNDEFINED",
    "parse", "to_text", "evaluate", "evaluate_batch", "is_undefined",
    "vectorize",
]

UNDEFINED = math.nan

FUNCTIONS = ("exp", "log", "sqrt", "sin", "cos", "abs")
NAMED_CONSTANTS = {"pi": math.pi, "e": math.e}


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Var, Name, Neg, Func, BinOp]


# ---------------------------------------------------------------------------
# Parsing

class ParseError(ValueError):
    """Syntax error at byte ``offset``; ``expected`` lists acceptable tokens."""

    def __init__(self, message: str, offset: int, expected: Iterable[str] = ()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class UnknownIdentifierError(ParseError):
    def __init__(self, name: str, offset: int):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", offset,
                         ("x", *NAMED_CONSTANTS, *FUNCTIONS))


_TOKEN_RE = re.compile(rb"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)

_ATOM_START = frozenset({"number", "x", "pi", "e", "(", *FUNCTIONS})


@dataclass(frozen=True)
class _Token:
    kind: str   # "number", "ident", an operator character, or "end"
    text: str
    offset: int  # byte offset into the utf-8 source


def _tokenize(source: str) -> list[_Token]:
    data = source.encode("utf-8")
    tokens = []
    pos = 0
    while pos < len(data):
        m = _TOKEN_RE.match(data, pos)
        if m is None:
            bad = data[pos:pos + 1].decode("utf-8", errors="replace")
            raise ParseError(f"unexpected character {bad!r}", pos,
                             _ATOM_START | {"-", "+", "*", "/", "^", ")"})
        kind = m.lastgroup
        if kind != "ws":
            text = m.group().decode("ascii")
            tokens.append(_Token(text if kind == "op" else kind, text, pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(data)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: Iterable[str]):
        tok = self.tok
        what = "end of input" if tok.kind == "end" else f"unexpected {tok.text!r}"
        raise ParseError(what, tok.offset, expected)

    def expect(self, kind: str) -> _Token:
        if self.tok.kind != kind:
            self.fail({kind})
        return self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.advance().kind
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.tok.kind in ("*", "/"):
            op = self.advance().kind
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        if self.tok.kind == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "^":
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ParseError(f"numeric literal {tok.text!r} overflows", tok.offset)
            return Const(value)
        if tok.kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "ident":
            self.advance()
            if tok.text == "x":
                return Var()
            if tok.text in NAMED_CONSTANTS:
                return Name(tok.text)
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(tok.text, arg)
            raise UnknownIdentifierError(tok.text, tok.offset)
        self.fail(_ATOM_START | {"-"})


def parse(source: str) -> Expr:
    """Parse ``source`` into an expression tree.

    Raises :class:`ParseError` (with byte offset and expected-token set) on
    malformed input and :class:`UnknownIdentifierError` on names outside
    the language.
    """
    if not source or not source.strip():
        raise ParseError("empty expression", 0, _ATOM_START | {"-"})
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def _fmt_const(value: float) -> str:
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def to_text(node: Expr) -> str:
    """Render ``node`` with the fewest parentheses that re-parse to the same tree."""

    def wrap(child: Expr, min_prec: int) -> str:
        s = to_text(child)
        return s if _prec(child) >= min_prec else f"({s})"

    if isinstance(node, Const):
        return _fmt_const(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Func):
        return f"{node.name}({to_text(node.arg)})"
    if isinstance(node, Neg):
        return "-" + wrap(node.arg, _PREC["neg"])
    if isinstance(node, BinOp):
        if node.op == "^":
            return f"{wrap(node.left, _PREC['atom'])}^{wrap(node.right, _PREC['neg'])}"
        p = _PREC[node.op]
        # left-associative: right operand must bind tighter
        return f"{wrap(node.left, p)} {node.op} {wrap(node.right, p + 1)}"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Scalar evaluation

def _finite(v: float) -> float:
    return v if math.isfinite(v) else UNDEFINED


def _pow(base: float, exponent: float) -> float:
    try:
        return math.pow(base, exponent)
    except (ValueError, OverflowError, ZeroDivisionError):
        return UNDEFINED


def _scalar_func(name: str, v: float) -> float:
    try:
        if name == "exp":
            return math.exp(v)
        if name == "log":
            return math.log(v) if v > 0 else UNDEFINED
        if name == "sqrt":
            return math.sqrt(v) if v >= 0 else UNDEFINED
        if name == "sin":
            return math.sin(v)
        if name == "cos":
            return math.cos(v)
        if name == "abs":
            return abs(v)
    except (OverflowError, ValueError):
        return UNDEFINED
    raise ValueError(f"unknown function {name!r}")


def evaluate(node: Expr, x: float) -> float:
    """Evaluate ``node`` at ``x``; returns NaN when the value is undefined."""
    x = float(x)
    if math.isnan(x):
        return UNDEFINED
    return _eval(node, x)


def _eval(node: Expr, x: float) -> float:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Name):
        return NAMED_CONSTANTS[node.name]
    if isinstance(node, Neg):
        return -_eval(node.arg, x)
    if isinstance(node, Func):
        v = _eval(node.arg, x)
        if math.isnan(v):
            return UNDEFINED
        return _finite(_scalar_func(node.name, v))
    if isinstance(node, BinOp):
        left = _eval(node.left, x)
        if math.isnan(left):
            return UNDEFINED
        right = _eval(node.right, x)
        if math.isnan(right):
            return UNDEFINED
        op = node.op
        if op == "+":
            return _finite(left + right)
        if op == "-":
            return _finite(left - right)
        if op == "*":
            return _finite(left * right)
        if op == "/":
            return UNDEFINED if right == 0.0 else _finite(left / right)
        if op == "^":
            return _finite(_pow(left, right))
    raise TypeError(f"not an expression node: {node!r}")


def evaluate_batch(node: Expr, xs: Iterable[float]) -> list[float]:
    """Elementwise :func:`evaluate`, order preserved."""
    return [evaluate(node, x) for x in xs]


def is_undefined(value) -> bool:
    return bool(np.isnan(value))


# ---------------------------------------------------------------------------
# Vectorised evaluation (numpy), used by the sampling and quadrature code.
# Agrees with `evaluate` up to the last-bit differences between numpy's and
# libm's transcendental functions.

_NP_FUNCS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "exp": np.exp,
    "log": lambda v: np.log(np.where(v > 0, v, np.nan)),
    "sqrt": lambda v: np.sqrt(np.where(v >= 0, v, np.nan)),
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
}


def _np_pow(base: np.ndarray, exponent: np.ndarray) -> np.ndarray:
    bad = (base < 0) & (exponent != np.floor(exponent))
    bad |= (base == 0) & (exponent < 0)
    out = np.power(base, exponent)
    return np.where(bad, np.nan, out) if np.any(bad) else out


def _np_clean(v):
    bad = ~np.isfinite(v)
    return np.where(bad, np.nan, v) if np.any(bad) else v


# Overflow is allowed to produce inf inside a subtree; only operations that
# could map inf back to a finite value (division, exp, power) clean their
# operands first, and the final result is cleaned once.
_CLEANS_OPERANDS = frozenset({"/", "^", "exp"})


def vectorize(node: Expr) -> Callable[[np.ndarray], np.ndarray]:
    """Compile ``node`` into a function of a float array; NaN marks undefined."""

    def build(n: Expr):
        if isinstance(n, Const):
            value = n.value
            return lambda x: value
        if isinstance(n, Var):
            return lambda x: x
        if isinstance(n, Name):
            value = NAMED_CONSTANTS[n.name]
            return lambda x: value
        if isinstance(n, Neg):
            inner = build(n.arg)
            return lambda x: -inner(x)
        if isinstance(n, Func):
            inner, fn = build(n.arg), _NP_FUNCS[n.name]
            if n.name in _CLEANS_OPERANDS:
                return lambda x: fn(_np_clean(inner(x)))
            return lambda x: fn(inner(x))
        if isinstance(n, BinOp):
            lhs, rhs = build(n.left), build(n.right)
            if n.op == "+":
                return lambda x: lhs(x) + rhs(x)
            if n.op == "-":
                return lambda x: lhs(x) - rhs(x)
            if n.op == "*":
                return lambda x: lhs(x) * rhs(x)
            if n.op == "/":
                def div(x):
                    den = _np_clean(np.asarray(rhs(x), dtype=float))
                    return _np_clean(lhs(x)) / np.where(den == 0.0, np.nan, den)
                return div
            if n.op == "^":
                return lambda x: _np_pow(_np_clean(np.asarray(lhs(x), dtype=float)),
                                         _np_clean(np.asarray(rhs(x), dtype=float)))
        raise TypeError(f"not an expression node: {n!r}")

    compiled = build(node)

    def fn(x) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = compiled(arr)
            return _np_clean(np.broadcast_to(np.asarray(out, dtype=float), arr.shape).copy())

    return fn


# ---------------------------------------------------------------------------
# Domains and function specs

class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError(f"interval endpoints must be finite, got [{self.a}, {self.b}]")
        if not self.a < self.b:
            raise DomainError(f"interval needs a < b, got [{self.a}, {self.b}]")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def width(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class FunctionSpec:
    """An expression together with the closed interval it lives on."""

    expr: Expr
    domain: Interval
    source: str = field(default="", compare=False)
    _vec: Callable = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_vec", vectorize(self.expr))
        for end in (self.domain.a, self.domain.b):
            if math.isnan(evaluate(self.expr, end)):
                raise DomainError(f"{self.text!r} is undefined at endpoint {end!r}")

    @classmethod
    def from_text(cls, source: str, a: float, b: float) -> "FunctionSpec":
        return cls(parse(source), Interval(float(a), float(b)), source)

    @property
    def text(self) -> str:
        return self.source or to_text(self.expr)

    def __call__(self, x: float) -> float:
        return evaluate(self.expr, x)

    def values(self, xs) -> np.ndarray:
        """Vectorised evaluation; NaN marks undefined points."""
        return self._vec(xs)

    def times(self, other: "FunctionSpec") -> "FunctionSpec":
        """The pointwise product on a shared domain."""
        if other.domain != self.domain:
            raise DomainError("product needs identical domains")
        return FunctionSpec(BinOp("*", self.expr, other.expr), self.domain,
                            f"({self.text})*({other.text})")

    def scaled(self, c: float) -> "FunctionSpec":
        return FunctionSpec(BinOp("*", Const(float(c)), self.expr), self.domain)
