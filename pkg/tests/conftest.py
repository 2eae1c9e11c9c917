"""Shared test helpers: seeded expression/problem generators and the
correction-audit used by several suites."""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from hypothesis import HealthCheck, settings

from pdeseries.expr import (
    Const,
    Expr,
    Func,
    Pow,
    Prod,
    SamplePlan,
    Sum,
    TIME_INDEX,
    Var,
    ZERO,
    normalize,
    sampled_deviation,
)
from pdeseries.series import (
    OperatorTerm,
    ProblemSpec,
    RationalMatrix,
    SpatialOperator,
    apply_operator,
    forcing_coefficients,
    invert,
    series_scale_matrix,
    vec_add,
)
from pdeseries.errors import SingularRho

settings.register_profile(
    "pdeseries",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("pdeseries")

PLAN = SamplePlan()

PROBLEM_DIR = Path(__file__).resolve().parent.parent / "problems"


def problem_path(name: str) -> str:
    return str(PROBLEM_DIR / name)


# ---------------------------------------------------------------------------
# Random expressions
# ---------------------------------------------------------------------------

def random_raw_expr(
    rng: random.Random,
    depth: int = 3,
    n_vars: int = 2,
    funcs: tuple[str, ...] = ("sin", "cos", "exp", "ln", "sinh", "cosh", "tanh"),
    allow_time: bool = False,
    allow_negative_pow: bool = True,
) -> Expr:
    """Unnormalized random tree over the full grammar."""
    def leaf() -> Expr:
        roll = rng.random()
        if roll < 0.45:
            return Const(Fraction(rng.randint(-6, 6), rng.randint(1, 4)))
        if allow_time and roll < 0.55:
            return Var(TIME_INDEX)
        return Var(rng.randint(1, n_vars))

    def build(d: int) -> Expr:
        if d == 0 or rng.random() < 0.25:
            return leaf()
        kind = rng.choice(("sum", "sum", "prod", "prod", "pow", "func"))
        if kind == "sum":
            return Sum(tuple(build(d - 1) for _ in range(rng.randint(2, 3))))
        if kind == "prod":
            return Prod(tuple(build(d - 1) for _ in range(rng.randint(2, 3))))
        if kind == "pow":
            exponents = [2, 3] + ([-1, -2] if allow_negative_pow else [])
            return Pow(build(d - 1), rng.choice(exponents))
        return Func(rng.choice(funcs), build(d - 1))

    return build(depth)


def random_normal_expr(rng: random.Random, **kwargs) -> Expr:
    from pdeseries.errors import DomainError

    while True:
        try:
            return normalize(random_raw_expr(rng, **kwargs))
        except DomainError:
            continue  # raw tree folded a zero to a negative power



def random_numeric_expr(rng: random.Random, depth: int = 3, n_vars: int = 2) -> Expr:
    """Random normalized expression that evaluates everywhere on [-1, 1]:
    no ln, no negative powers."""
    return random_normal_expr(
        rng,
        depth=depth,
        n_vars=n_vars,
        funcs=("sin", "cos", "exp", "sinh", "cosh", "tanh"),
        allow_negative_pow=False,
    )


# ---------------------------------------------------------------------------
# Random problems (polynomial/trig data, small dimensions)
# ---------------------------------------------------------------------------

def _random_invertible(rng: random.Random, m: int) -> RationalMatrix:
    while True:
        rows = [[Fraction(rng.randint(-3, 3)) for _ in range(m)] for _ in range(m)]
        matrix = RationalMatrix.from_rows(rows)
        try:
            invert(matrix)
        except SingularRho:
            continue
        return matrix


def _random_data_expr(rng: random.Random, n: int) -> Expr:
    def piece() -> Expr:
        c = Const(Fraction(rng.randint(-3, 3), rng.choice((1, 1, 2))))
        roll = rng.random()
        if roll < 0.35:
            power = rng.randint(0, 3)
            return normalize(Prod((c, Pow(Var(1), power))))
        if roll < 0.55 and n >= 2:
            return normalize(Prod((c, Pow(Var(1), rng.randint(0, 2)),
                                   Pow(Var(2), rng.randint(0, 2)))))
        if roll < 0.8:
            return normalize(Prod((c, Func("sin", Var(rng.randint(1, n))))))
        return normalize(Prod((c, Func("cos", Var(rng.randint(1, n))))))

    return normalize(Sum(tuple(piece() for _ in range(rng.randint(1, 2)))))


def random_problem(seed: int) -> tuple[ProblemSpec, int]:
    """Small random problem plus a correction count J in 1..3; order is
    set to the finalized window 2J+1."""
    rng = random.Random(seed)
    m = rng.choice((1, 1, 2))
    n = rng.choice((1, 2))
    rho = _random_invertible(rng, m)

    terms = []
    for _ in range(rng.randint(1, 3)):
        orders = [0] * n
        for _ in range(rng.choice((1, 2, 2))):
            orders[rng.randrange(n)] += 1
        if rng.random() < 0.75:
            coeff: Expr = Const(Fraction(rng.choice((-2, -1, 1, 1, 2)), rng.choice((1, 2))))
        else:
            coeff = normalize(Prod((Const(Fraction(rng.choice((-1, 1)))), Var(rng.randint(1, n)))))
        terms.append(OperatorTerm(rng.randrange(m), rng.randrange(m), coeff, tuple(orders)))
    operator = SpatialOperator(m, n, tuple(terms))

    u0 = [_random_data_expr(rng, n) for _ in range(m)]
    u1 = [_random_data_expr(rng, n) for _ in range(m)]
    f = []
    for _ in range(m):
        if rng.random() < 0.25:
            f.append(ZERO)
        else:
            t_power = rng.randint(0, 2)
            f.append(normalize(Prod((Pow(Var(TIME_INDEX), t_power), _random_data_expr(rng, n)))))

    corrections = rng.randint(1, 3)
    problem = ProblemSpec.create(
        m, n, rho, operator, f, u0, u1, order=2 * corrections + 1
    )
    return problem, corrections


# ---------------------------------------------------------------------------
# Correction audit: second time derivative of each correction must match
# its defining source term
# ---------------------------------------------------------------------------

def correction_audit_max_deviation(p, expansion, plan: SamplePlan = PLAN) -> float:
    """Worst coefficient deviation of d2/dt2 u^(j) against
    rho^{-1}(L u^(j-1) + f when j == 1) over all corrections j >= 1."""
    f = forcing_coefficients(p, expansion.working_order)
    zero_vec = (ZERO,) * p.m
    worst = 0.0
    for j in range(1, expansion.max_correction + 1):
        prev = expansion.corrections[j - 1]
        second = expansion.corrections[j].second_time_derivative()
        for k in range(expansion.working_order - 1):
            source = apply_operator(p.L, prev.coefficient(k))
            source = vec_add(source, f[k] if j == 1 else zero_vec)
            source = series_scale_matrix(p.rho_inv, source)
            for a, b in zip(second.coefficient(k), source):
                if a == b:
                    continue  # structurally identical, deviation zero
                dev = sampled_deviation(a, b, plan)
                if dev > worst:
                    worst = dev
    return worst
