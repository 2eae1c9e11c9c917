"""Immutable symbolic expression trees over spatial variables.

Expressions are built from exact rational constants, indexed variables,
sums, products, integer powers and a small set of analytic functions
(sin, cos, exp, ln, sinh, cosh, tanh).  ``normalize`` brings a tree to a
canonical flattened form with folded constants and collected terms; it
never applies trigonometric or exponential identities.  Value equality
is decided numerically by seeded sampling (``equal_sampled``), the
package's stand-in for undecidable symbolic zero-testing.

Floats never enter the symbolic layer; they appear only in ``evaluate``.
Variable index 0 is reserved for the time symbol of the extended
grammar used by time expansion; spatial variables are indexed 1..n.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, SamplingExhausted

TIME_INDEX = 0

FUNCTIONS = ("sin", "cos", "exp", "ln", "sinh", "cosh", "tanh")
_FUNC_RANK = {name: i for i, name in enumerate(FUNCTIONS)}


class Expr:
    """Base class for expression nodes.

    Instances are immutable, hashable and comparable structurally.
    Arithmetic operators build normalized trees, so tests and problem
    builders can write ``2 * x - x`` and obtain ``x``.
    """

    __slots__ = ()

    def __add__(self, other) -> "Expr":
        return _add([self, as_expr(other)])

    __radd__ = __add__

    def __sub__(self, other) -> "Expr":
        return _add([self, _mul([MINUS_ONE, as_expr(other)])])

    def __rsub__(self, other) -> "Expr":
        return _add([as_expr(other), _mul([MINUS_ONE, self])])

    def __mul__(self, other) -> "Expr":
        return _mul([self, as_expr(other)])

    __rmul__ = __mul__

    def __neg__(self) -> "Expr":
        return _mul([MINUS_ONE, self])

    def __pow__(self, exponent: int) -> "Expr":
        if not isinstance(exponent, int):
            raise TypeError("exponents must be Python ints")
        return _pow(self, exponent)

    def __truediv__(self, other) -> "Expr":
        return _mul([self, _pow(as_expr(other), -1)])

    def __rtruediv__(self, other) -> "Expr":
        return _mul([as_expr(other), _pow(self, -1)])


@dataclass(frozen=True, slots=True)
class Const(Expr):
    """Exact rational constant."""

    value: Fraction

    def __post_init__(self):
        if isinstance(self.value, float):
            raise TypeError("floats are not allowed in the symbolic layer")
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True, slots=True)
class Var(Expr):
    """Variable by index: 0 is the time symbol, 1..n are spatial."""

    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("variable index must be nonnegative")


@dataclass(frozen=True, slots=True)
class Sum(Expr):
    terms: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True, slots=True)
class Prod(Expr):
    factors: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    """Integer power of a base expression."""

    base: Expr
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or isinstance(self.exponent, bool):
            raise TypeError("power exponent must be a Python int")


@dataclass(frozen=True, slots=True)
class Func(Expr):
    """Application of one of the supported analytic functions."""

    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unsupported function {self.name!r}")


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))
MINUS_ONE = Const(Fraction(-1))


def as_expr(x) -> Expr:
    """Coerce an int or Fraction to a constant; pass expressions through."""
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Const(Fraction(x))
    raise TypeError(f"cannot use {type(x).__name__} as an expression")


def const(x) -> Const:
    return Const(Fraction(x))


def var(index: int) -> Var:
    return Var(index)


def func(name: str, arg) -> Expr:
    return normalize(Func(name, as_expr(arg)))


def sin(e) -> Expr:
    return func("sin", e)


def cos(e) -> Expr:
    return func("cos", e)


def exp(e) -> Expr:
    return func("exp", e)


def ln(e) -> Expr:
    return func("ln", e)


def sinh(e) -> Expr:
    return func("sinh", e)


def cosh(e) -> Expr:
    return func("cosh", e)


def tanh(e) -> Expr:
    return func("tanh", e)


# ---------------------------------------------------------------------------
# Canonical ordering
# ---------------------------------------------------------------------------

def sort_key(e: Expr):
    """Total order on trees; drives deterministic child ordering."""
    if isinstance(e, Const):
        return (0, (e.value.numerator, e.value.denominator))
    if isinstance(e, Var):
        return (1, (e.index,))
    if isinstance(e, Func):
        return (2, (sort_key(e.arg), _FUNC_RANK[e.name]))
    if isinstance(e, Pow):
        return (3, (sort_key(e.base), e.exponent))
    if isinstance(e, Prod):
        return (4, tuple(sort_key(f) for f in e.factors))
    return (5, tuple(sort_key(t) for t in e.terms))


def _factor_key(f: Expr):
    # Product factors sort by (base, exponent) so that sin(x1)^2 keeps
    # its place next to other functions of x1 regardless of the power.
    if isinstance(f, Pow):
        return (sort_key(f.base), f.exponent)
    return (sort_key(f), 1)


def _split_coeff(t: Expr) -> tuple[Fraction, Expr]:
    """Write a normalized non-constant term as coefficient * remainder."""
    if isinstance(t, Prod) and isinstance(t.factors[0], Const):
        rest = t.factors[1:]
        return t.factors[0].value, (rest[0] if len(rest) == 1 else Prod(rest))
    return Fraction(1), t


def _term_key(t: Expr):
    coeff, rest = _split_coeff(t)
    return (sort_key(rest), coeff)


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

# Exact special values: these are rational constant folds, not
# simplification identities (normalize applies no trig/exp identities).
_AT_ZERO = {"sin": "zero", "sinh": "zero", "tanh": "zero",
            "cos": "one", "cosh": "one", "exp": "one"}


def normalize(e: Expr) -> Expr:
    """Canonical form: flattened, constant-folded, like terms collected,
    children ordered by the fixed total order.  Idempotent.  Applies no
    trigonometric or exponential identities."""
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Func):
        arg = normalize(e.arg)
        if arg == ZERO and e.name in _AT_ZERO:
            return ZERO if _AT_ZERO[e.name] == "zero" else ONE
        if arg == ONE and e.name == "ln":
            return ZERO
        return Func(e.name, arg)
    if isinstance(e, Pow):
        return _pow(normalize(e.base), e.exponent)
    if isinstance(e, Prod):
        return _mul([normalize(f) for f in e.factors])
    if isinstance(e, Sum):
        return _add([normalize(t) for t in e.terms])
    raise TypeError(f"not an expression: {e!r}")


def _pow(base: Expr, k: int) -> Expr:
    if k == 0:
        return ONE
    if k == 1:
        return base
    if isinstance(base, Const):
        if base.value == 0 and k < 0:
            raise DomainError("zero raised to a negative power")
        return Const(base.value ** k)
    if isinstance(base, Pow):
        return _pow(base.base, base.exponent * k)
    if isinstance(base, Prod):
        return _mul([_pow(f, k) for f in base.factors])
    if isinstance(base, Sum):
        content, primitive = _sum_content(base)
        if content != 1:
            return _mul([Const(content ** k), Pow(primitive, k)])
    return Pow(base, k)


def _sum_content(s: Sum) -> tuple[Fraction, Expr]:
    """Split a normalized sum into (rational content, primitive sum).

    The content is the gcd of the term coefficients, signed so the
    primitive sum's leading coefficient is positive.  Keeping sums
    inside products primitive makes normalization independent of how a
    product was associated."""
    coeffs = [
        t.value if isinstance(t, Const) else _split_coeff(t)[0] for t in s.terms
    ]
    content = Fraction(
        math.gcd(*(abs(c.numerator) for c in coeffs)),
        math.lcm(*(c.denominator for c in coeffs)),
    )
    if coeffs[0] < 0:
        content = -content
    if content == 1:
        return Fraction(1), s
    inverse = Const(1 / content)
    return content, _add([_mul([inverse, t]) for t in s.terms])


def _mul(factors: Iterable[Expr]) -> Expr:
    flat: list[Expr] = []
    for f in factors:
        if isinstance(f, Prod):
            flat.extend(f.factors)
        else:
            flat.append(f)

    coeff = Fraction(1)
    powers: dict[Expr, int] = {}
    for f in flat:
        if isinstance(f, Const):
            coeff *= f.value
            continue
        if isinstance(f, Pow):
            base, k = f.base, f.exponent
        else:
            base, k = f, 1
        if isinstance(base, Sum):
            content, base = _sum_content(base)
            if content != 1:
                coeff *= content ** k
        powers[base] = powers.get(base, 0) + k

    if coeff == 0:
        return ZERO

    parts = [_pow(b, k) for b, k in powers.items() if k != 0]
    parts.sort(key=_factor_key)
    if not parts:
        return Const(coeff)
    if coeff == 1:
        return parts[0] if len(parts) == 1 else Prod(tuple(parts))
    if len(parts) == 1 and isinstance(parts[0], Sum):
        # distribute the rational over a bare sum so that scaled sums
        # stay flat and like terms keep collecting across operations
        return _add([_mul([Const(coeff), t]) for t in parts[0].terms])
    return Prod((Const(coeff), *parts))


def _add(terms: Iterable[Expr]) -> Expr:
    flat: list[Expr] = []
    for t in terms:
        if isinstance(t, Sum):
            flat.extend(t.terms)
        else:
            flat.append(t)

    const_acc = Fraction(0)
    groups: dict[Expr, Fraction] = {}
    for t in flat:
        if isinstance(t, Const):
            const_acc += t.value
            continue
        coeff, rest = _split_coeff(t)
        groups[rest] = groups.get(rest, Fraction(0)) + coeff

    parts: list[Expr] = []
    for rest, coeff in groups.items():
        if coeff == 0:
            continue
        parts.append(rest if coeff == 1 else _mul([Const(coeff), rest]))
    parts.sort(key=_term_key)
    if const_acc != 0:
        parts.insert(0, Const(const_acc))
    if not parts:
        return ZERO
    if len(parts) == 1:
        return parts[0]
    return Sum(tuple(parts))


def esum(terms: Iterable[Expr]) -> Expr:
    """Normalized sum of already-normalized expressions."""
    return _add(list(terms))


def eprod(factors: Iterable[Expr]) -> Expr:
    """Normalized product of already-normalized expressions."""
    return _mul(list(factors))


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------

def differentiate(e: Expr, variable: int) -> Expr:
    """Exact symbolic partial derivative, returned normalized."""
    return _diff(normalize(e), variable)


def _diff(e: Expr, v: int) -> Expr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.index == v else ZERO
    if isinstance(e, Sum):
        return _add([_diff(t, v) for t in e.terms])
    if isinstance(e, Prod):
        pieces = []
        fs = e.factors
        for i, f in enumerate(fs):
            df = _diff(f, v)
            if df == ZERO:
                continue
            pieces.append(_mul([df, *fs[:i], *fs[i + 1:]]))
        return _add(pieces)
    if isinstance(e, Pow):
        db = _diff(e.base, v)
        if db == ZERO:
            return ZERO
        return _mul([Const(Fraction(e.exponent)), _pow(e.base, e.exponent - 1), db])
    if isinstance(e, Func):
        da = _diff(e.arg, v)
        if da == ZERO:
            return ZERO
        a = e.arg
        if e.name == "sin":
            outer: Expr = Func("cos", a)
        elif e.name == "cos":
            outer = _mul([MINUS_ONE, Func("sin", a)])
        elif e.name == "exp":
            outer = e
        elif e.name == "ln":
            outer = _pow(a, -1)
        elif e.name == "sinh":
            outer = Func("cosh", a)
        elif e.name == "cosh":
            outer = Func("sinh", a)
        else:  # tanh
            outer = _add([ONE, _mul([MINUS_ONE, _pow(Func("tanh", a), 2)])])
        return _mul([outer, da])
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# Substitution and structure queries
# ---------------------------------------------------------------------------

def substitute(e: Expr, variable: int, replacement: Expr) -> Expr:
    """Replace every occurrence of the variable; result is normalized.

    May raise DomainError if the substitution forces a constant fold
    like zero to a negative power."""
    return normalize(_subst(e, variable, replacement))


def _subst(e: Expr, v: int, r: Expr) -> Expr:
    if isinstance(e, Var):
        return r if e.index == v else e
    if isinstance(e, Const):
        return e
    if isinstance(e, Func):
        return Func(e.name, _subst(e.arg, v, r))
    if isinstance(e, Pow):
        return Pow(_subst(e.base, v, r), e.exponent)
    if isinstance(e, Prod):
        return Prod(tuple(_subst(f, v, r) for f in e.factors))
    return Sum(tuple(_subst(t, v, r) for t in e.terms))


def max_variable_index(e: Expr) -> int:
    """Largest spatial variable index used (0 when none)."""
    if isinstance(e, Var):
        return e.index
    if isinstance(e, Const):
        return 0
    if isinstance(e, Func):
        return max_variable_index(e.arg)
    if isinstance(e, Pow):
        return max_variable_index(e.base)
    children = e.factors if isinstance(e, Prod) else e.terms
    return max((max_variable_index(c) for c in children), default=0)


def uses_time(e: Expr) -> bool:
    """True when the distinguished time symbol occurs in the tree."""
    if isinstance(e, Var):
        return e.index == TIME_INDEX
    if isinstance(e, Const):
        return False
    if isinstance(e, Func):
        return uses_time(e.arg)
    if isinstance(e, Pow):
        return uses_time(e.base)
    children = e.factors if isinstance(e, Prod) else e.terms
    return any(uses_time(c) for c in children)


# ---------------------------------------------------------------------------
# Numeric evaluation
# ---------------------------------------------------------------------------

_MATH = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "ln": math.log,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "tanh": math.tanh,
}


def evaluate(e: Expr, point: Sequence[float], *, time: float | None = None) -> float:
    """Evaluate at a point (component i binds variable x_i, 1-based).

    ``time`` supplies the value of the time symbol for expressions from
    the extended grammar.  Raises DomainError on ln of a nonpositive
    argument, zero to a negative power, or numeric overflow."""
    try:
        return _eval(e, point, time)
    except OverflowError as exc:
        raise DomainError("numeric overflow during evaluation") from exc


def _eval(e: Expr, point: Sequence[float], time: float | None) -> float:
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Var):
        if e.index == TIME_INDEX:
            if time is None:
                raise ValueError("expression uses the time symbol but no time value was given")
            return time
        return float(point[e.index - 1])
    if isinstance(e, Sum):
        return sum(_eval(t, point, time) for t in e.terms)
    if isinstance(e, Prod):
        out = 1.0
        for f in e.factors:
            out *= _eval(f, point, time)
        return out
    if isinstance(e, Pow):
        b = _eval(e.base, point, time)
        if b == 0.0 and e.exponent < 0:
            raise DomainError("zero base with negative exponent")
        return b ** e.exponent
    if isinstance(e, Func):
        a = _eval(e.arg, point, time)
        if e.name == "ln" and a <= 0.0:
            raise DomainError(f"ln of nonpositive value {a}")
        return _MATH[e.name](a)
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# Sampled equality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SamplePlan:
    """Configuration of the numeric equality oracle.

    Points are drawn uniformly from ``domain`` for every variable (and
    for the time symbol when present), deterministically from ``seed``.
    Two expressions count as equal at a point when
    ``|a - b| <= tolerance * (1 + max(|a|, |b|))``.
    """

    seed: int = 42
    points_per_check: int = 32
    domain: tuple[float, float] = (-1.0, 1.0)
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.points_per_check < 1:
            raise ValueError("points_per_check must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError("sampling interval is empty")


DEFAULT_PLAN = SamplePlan()

_RESAMPLE_TRIES = 64


def sampled_deviation(a: Expr, b: Expr, plan: SamplePlan = DEFAULT_PLAN) -> float:
    """Worst relative deviation |a-b| / (1 + max(|a|,|b|)) over the plan's
    sample points.  Points where either side raises DomainError are
    redrawn a bounded number of times; SamplingExhausted if none work."""
    n_vars = max(1, max_variable_index(a), max_variable_index(b))
    with_time = uses_time(a) or uses_time(b)
    rng = random.Random(plan.seed)
    lo, hi = plan.domain
    worst = 0.0
    for _ in range(plan.points_per_check):
        for _attempt in range(_RESAMPLE_TRIES):
            point = [rng.uniform(lo, hi) for _ in range(n_vars)]
            tval = rng.uniform(lo, hi) if with_time else None
            try:
                va = evaluate(a, point, time=tval)
                vb = evaluate(b, point, time=tval)
            except DomainError:
                continue
            break
        else:
            raise SamplingExhausted(
                f"no valid sample point found in {_RESAMPLE_TRIES} draws"
            )
        dev = abs(va - vb) / (1.0 + max(abs(va), abs(vb)))
        if dev > worst:
            worst = dev
    return worst


def equal_sampled(a: Expr, b: Expr, plan: SamplePlan = DEFAULT_PLAN) -> bool:
    """Numeric equality oracle: true iff the expressions agree within the
    plan's tolerance at every sampled point."""
    return sampled_deviation(a, b, plan) <= plan.tolerance


def is_zero_sampled(e: Expr, plan: SamplePlan = DEFAULT_PLAN) -> bool:
    return equal_sampled(e, ZERO, plan)
