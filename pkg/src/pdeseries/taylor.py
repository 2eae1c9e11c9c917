"""Direct time-power-series engine.

Builds the solution coefficients by the second-order recursion
u_{j+2} = rho^{-1} (L u_j + f_j) / ((j+1)(j+2)) and classifies exact
termination of the series.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expr import DEFAULT_PLAN, SamplePlan, ZERO, equal_sampled
from .series import (
    ProblemSpec,
    TimeSeriesVec,
    apply_operator,
    forcing_coefficients,
    series_scale_matrix,
    vec_add,
)


@dataclass(frozen=True)
class TaylorSolution:
    """Computed series plus the exact-termination verdict.

    ``exact`` is a sampled claim, never an algebraic certificate."""

    series: TimeSeriesVec
    exact: bool
    exact_reason: str | None


def taylor_coefficients(p: ProblemSpec) -> TimeSeriesVec:
    """Run the recursion up to the problem's truncation order."""
    f = forcing_coefficients(p, p.order)
    coeffs = [p.u0, p.u1]
    for j in range(p.order - 1):
        w = vec_add(apply_operator(p.L, coeffs[j]), f[j])
        scale = Fraction(1, (j + 1) * (j + 2))
        coeffs.append(series_scale_matrix(p.rho_inv.scaled(scale), w))
    return TimeSeriesVec(p.m, p.order, tuple(coeffs))


def solve_taylor(p: ProblemSpec, plan: SamplePlan = DEFAULT_PLAN) -> TaylorSolution:
    series = taylor_coefficients(p)
    exact, reason = detect_exact(p, series, plan)
    return TaylorSolution(series=series, exact=exact, exact_reason=reason)


def detect_exact(
    p: ProblemSpec, sol: TimeSeriesVec, plan: SamplePlan = DEFAULT_PLAN
) -> tuple[bool, str | None]:
    """Classify exact termination of a computed series.

    "linear-exact": u0 and f_0 vanish, L u1 + f_1 vanishes, and every
    higher forcing coefficient vanishes, so by induction the solution
    collapses to t*u1 (u1 itself nonzero, otherwise the verdict would
    be vacuous).  "tail-zero": every computed coefficient of degree 2
    and up vanishes.  All checks use sampled equality.
    """
    f = forcing_coefficients(p, sol.order)

    def vanishes(vec) -> bool:
        return all(equal_sampled(c, ZERO, plan) for c in vec)

    linear = (
        vanishes(p.u0)
        and vanishes(f[0])
        and vanishes(vec_add(apply_operator(p.L, p.u1), f[1]))
        and all(vanishes(f[j]) for j in range(2, sol.order + 1))
    )
    if linear and not vanishes(p.u1):
        return True, "linear-exact"
    if sol.order >= 2 and all(
        vanishes(sol.coefficient(j)) for j in range(2, sol.order + 1)
    ):
        return True, "tail-zero"
    return False, None
