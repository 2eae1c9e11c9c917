"""Expression grammar and problem-file parsing, plus canonical printing.

Grammar, lowest to highest precedence:

    additive        a + b | a - b          left associative
    multiplicative  a * b | a / b          left associative
    unary           -a
    power           a ^ k                  right associative, k must
                                           reduce to an integer constant
    atom            number | x1..xn | t | name(expr) | ( expr )

There is no implicit multiplication.  Division a/b becomes a * b^(-1)
for non-constant b and folds exactly when both sides are constant.
Decimal literals become exact rationals.  Offsets in errors are byte
offsets into the UTF-8 source.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DimensionMismatch,
    FormatError,
    NonIntegerExponent,
    ParseError,
    TimeNotAllowed,
    UnknownIdentifier,
)
from .expr import (
    Const,
    Expr,
    FUNCTIONS,
    Func,
    MINUS_ONE,
    Pow,
    Prod,
    Sum,
    TIME_INDEX,
    Var,
    normalize,
)
from .series import OperatorTerm, ProblemSpec, RationalMatrix, SpatialOperator


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    pos: int  # byte offset


_SINGLE = {
    ord("+"): "plus",
    ord("-"): "minus",
    ord("*"): "star",
    ord("/"): "slash",
    ord("^"): "caret",
    ord("("): "lparen",
    ord(")"): "rparen",
    ord(","): "comma",
}

_DIGITS = frozenset(b"0123456789")
_IDENT_START = frozenset(b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | _DIGITS


def tokenize(src: str) -> list[Token]:
    data = src.encode("utf-8")
    out: list[Token] = []
    i = 0
    while i < len(data):
        c = data[i]
        if c in b" \t\r\n":
            i += 1
            continue
        if c in _DIGITS:
            start = i
            while i < len(data) and data[i] in _DIGITS:
                i += 1
            if i + 1 < len(data) and data[i] == ord(".") and data[i + 1] in _DIGITS:
                i += 1
                while i < len(data) and data[i] in _DIGITS:
                    i += 1
            out.append(Token("number", data[start:i].decode("ascii"), start))
            continue
        if c in _IDENT_START:
            start = i
            while i < len(data) and data[i] in _IDENT_CONT:
                i += 1
            out.append(Token("ident", data[start:i].decode("ascii"), start))
            continue
        kind = _SINGLE.get(c)
        if kind is not None:
            out.append(Token(kind, chr(c), i))
            i += 1
            continue
        raise ParseError(f"unexpected character {bytes([c])!r}", i)
    out.append(Token("eof", "", len(data)))
    return out


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_VAR_PATTERN = re.compile(r"x([1-9][0-9]*)\Z")


class _Parser:
    def __init__(self, tokens: list[Token], n: int, allow_time: bool):
        self.tokens = tokens
        self.pos = 0
        self.n = n
        self.allow_time = allow_time

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, description: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                f"unexpected {tok.kind or 'end of input'}", tok.pos, (description,)
            )
        return self.advance()

    def parse(self) -> Expr:
        e = self.additive()
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(
                "unexpected token after expression", tok.pos,
                ("operator", "end of input"),
            )
        return e

    def additive(self) -> Expr:
        left = self.multiplicative()
        while self.peek().kind in ("plus", "minus"):
            op = self.advance()
            right = self.multiplicative()
            if op.kind == "minus":
                right = Prod((MINUS_ONE, right))
            left = Sum((left, right))
        return left

    def multiplicative(self) -> Expr:
        left = self.unary()
        while self.peek().kind in ("star", "slash"):
            op = self.advance()
            right = self.unary()
            if op.kind == "slash":
                right = Pow(right, -1)
            left = Prod((left, right))
        return left

    def unary(self) -> Expr:
        if self.peek().kind == "minus":
            self.advance()
            return Prod((MINUS_ONE, self.unary()))
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().kind != "caret":
            return base
        self.advance()
        exp_tok = self.peek()
        exponent_raw = self.unary()  # right associativity: x^2^3 = x^(2^3)
        exponent = normalize(exponent_raw)
        if not isinstance(exponent, Const) or exponent.value.denominator != 1:
            raise NonIntegerExponent(
                "exponent must reduce to an integer constant", exp_tok.pos
            )
        return Pow(base, int(exponent.value))

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Const(Fraction(tok.lexeme))
        if tok.kind == "lparen":
            self.advance()
            inner = self.additive()
            self.expect("rparen", "')'")
            return inner
        if tok.kind == "ident":
            self.advance()
            name = tok.lexeme
            if name == "t":
                if not self.allow_time:
                    raise TimeNotAllowed(
                        "the time symbol is not allowed here", tok.pos
                    )
                return Var(TIME_INDEX)
            if name in FUNCTIONS:
                self.expect("lparen", "'(' after function name")
                arg = self.additive()
                self.expect("rparen", "')'")
                return Func(name, arg)
            match = _VAR_PATTERN.match(name)
            if match:
                index = int(match.group(1))
                if index > self.n:
                    raise UnknownIdentifier(
                        f"variable {name} exceeds spatial dimension {self.n}", tok.pos
                    )
                return Var(index)
            raise UnknownIdentifier(f"unknown identifier {name!r}", tok.pos)
        raise ParseError(
            f"unexpected {tok.kind or 'end of input'}", tok.pos,
            ("number", "identifier", "'('", "'-'"),
        )


def parse_expr(src: str, n: int, *, allow_time: bool = False) -> Expr:
    """Parse an expression over x1..xn (and t when allowed); the result
    is normalized."""
    if n < 0:
        raise ValueError("spatial dimension must be nonnegative")
    tokens = tokenize(src)
    raw = _Parser(tokens, n, allow_time).parse()
    return normalize(raw)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def print_expr(e: Expr) -> str:
    """Render in the input grammar; parse_expr(print_expr(e)) is
    structurally e for normalized e."""
    return _fmt(e)


def _fmt(e: Expr) -> str:
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Var):
        return "t" if e.index == TIME_INDEX else f"x{e.index}"
    if isinstance(e, Func):
        return f"{e.name}({_fmt(e.arg)})"
    if isinstance(e, Pow):
        base = _fmt(e.base)
        if isinstance(e.base, (Sum, Prod, Const)):
            base = f"({base})"
        exponent = str(e.exponent) if e.exponent >= 0 else f"({e.exponent})"
        return f"{base}^{exponent}"
    if isinstance(e, Prod):
        factors = e.factors
        prefix = ""
        if isinstance(factors[0], Const):
            value = factors[0].value
            factors = factors[1:]
            if value == -1:
                prefix = "-"
            else:
                prefix = f"{value}*"
        body = "*".join(_fmt_factor(f) for f in factors)
        return prefix + body
    if isinstance(e, Sum):
        out = _fmt(e.terms[0])
        for term in e.terms[1:]:
            negated = _negated(term)
            if negated is not None:
                out += f" - {_fmt(negated)}"
            else:
                out += f" + {_fmt(term)}"
        return out
    raise TypeError(f"not an expression: {e!r}")


def _fmt_factor(f: Expr) -> str:
    text = _fmt(f)
    return f"({text})" if isinstance(f, Sum) else text


def _negated(term: Expr) -> Expr | None:
    """The positive counterpart when the term has a negative leading
    rational, else None."""
    if isinstance(term, Const) and term.value < 0:
        return Const(-term.value)
    if (
        isinstance(term, Prod)
        and isinstance(term.factors[0], Const)
        and term.factors[0].value < 0
    ):
        return normalize(Prod((MINUS_ONE, term)))
    return None


# ---------------------------------------------------------------------------
# Problem files
# ---------------------------------------------------------------------------

def _require(doc: dict, key: str):
    if key not in doc:
        raise FormatError(f"missing field {key!r}")
    return doc[key]


def _require_int(doc: dict, key: str, minimum: int) -> int:
    value = _require(doc, key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise FormatError(f"field {key!r} must be an integer")
    if value < minimum:
        raise FormatError(f"field {key!r} must be >= {minimum}")
    return value


def _rational(text, where: str) -> Fraction:
    if not isinstance(text, str):
        raise FormatError(f"{where} must be a rational string like \"-3/2\"")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"{where} is not a valid rational: {exc}") from exc


def _field_expr(text, n: int, allow_time: bool, where: str) -> Expr:
    if not isinstance(text, str):
        raise FormatError(f"{where} must be an expression string")
    try:
        return parse_expr(text, n, allow_time=allow_time)
    except ParseError as exc:
        raise type(exc)(f"{where}: {exc.message}", exc.offset, exc.expected) from exc


def _expr_vector(doc: dict, key: str, m: int, n: int, allow_time: bool) -> tuple[Expr, ...]:
    raw = _require(doc, key)
    if not isinstance(raw, list):
        raise FormatError(f"field {key!r} must be a list of expression strings")
    if len(raw) != m:
        raise DimensionMismatch(f"field {key!r} has length {len(raw)}, expected {m}")
    return tuple(
        _field_expr(text, n, allow_time, f"{key}[{i}]") for i, text in enumerate(raw)
    )


def parse_problem(src: str) -> ProblemSpec:
    """Parse and fully validate a JSON problem file; the mass matrix is
    inverted eagerly so singularity is a load-time error."""
    try:
        doc = json.loads(src)
    except json.JSONDecodeError as exc:
        raise FormatError(f"problem file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("problem file must be a JSON object")

    m = _require_int(doc, "m", minimum=1)
    n = _require_int(doc, "n", minimum=1)
    order = _require_int(doc, "order", minimum=1)

    rho_raw = _require(doc, "rho")
    if not isinstance(rho_raw, list) or len(rho_raw) != m or any(
        not isinstance(row, list) or len(row) != m for row in rho_raw
    ):
        raise DimensionMismatch(f"field 'rho' must be an {m}x{m} array")
    rho = RationalMatrix(tuple(
        tuple(_rational(cell, f"rho[{i}][{j}]") for j, cell in enumerate(row))
        for i, row in enumerate(rho_raw)
    ))

    terms_raw = _require(doc, "L")
    if not isinstance(terms_raw, list):
        raise FormatError("field 'L' must be a list of operator terms")
    terms = []
    for i, entry in enumerate(terms_raw):
        if not isinstance(entry, dict):
            raise FormatError(f"L[{i}] must be an object")
        row = entry.get("row")
        col = entry.get("col")
        derivs = entry.get("derivs")
        if not isinstance(row, int) or not isinstance(col, int) or isinstance(row, bool) or isinstance(col, bool):
            raise FormatError(f"L[{i}] row/col must be integers")
        if not isinstance(derivs, list) or not all(
            isinstance(k, int) and not isinstance(k, bool) for k in derivs
        ):
            raise FormatError(f"L[{i}].derivs must be a list of integers")
        if any(k < 0 for k in derivs):
            raise FormatError(f"L[{i}].derivs entries must be nonnegative")
        if len(derivs) != n:
            raise DimensionMismatch(
                f"L[{i}].derivs has length {len(derivs)}, expected {n}"
            )
        if not (0 <= row < m and 0 <= col < m):
            raise DimensionMismatch(f"L[{i}] row/col outside 0..{m - 1}")
        coeff = _field_expr(entry.get("coeff"), n, False, f"L[{i}].coeff")
        terms.append(OperatorTerm(row, col, coeff, tuple(derivs)))
    operator = SpatialOperator(m, n, tuple(terms))

    f = _expr_vector(doc, "f", m, n, allow_time=True)
    u0 = _expr_vector(doc, "u0", m, n, allow_time=False)
    u1 = _expr_vector(doc, "u1", m, n, allow_time=False)

    return ProblemSpec.create(m, n, rho, operator, f, u0, u1, order)


def load_problem(path: str) -> ProblemSpec:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_problem(handle.read())
