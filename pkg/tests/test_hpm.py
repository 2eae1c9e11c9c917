"""Perturbation-correction engine: worked corrections, structural laws,
and the defining-relation audit."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PLAN, correction_audit_max_deviation, problem_path, random_problem
from pdeseries.expr import ZERO, const, equal_sampled
from pdeseries.hpm import partial_sum, solve_hpm
from pdeseries.parser import load_problem, parse_expr


@pytest.fixture(scope="module")
def wave():
    return load_problem(problem_path("wave_1d.prob"))


@pytest.fixture(scope="module")
def forced_wave():
    return load_problem(problem_path("forced_wave_2d.prob"))


class TestWorkedCorrections:
    def test_wave_corrections(self, wave):
        h = solve_hpm(wave, 2)
        sine = parse_expr("sin(x1)", 1)
        c0, c1, c2 = h.corrections
        assert c0.coefficient(0) == (sine,)
        assert all(c0.coefficient(d) == (ZERO,) for d in range(1, c0.order + 1))
        assert c1.coefficient(2) == (const(Fraction(-1, 2)) * sine,)
        assert c2.coefficient(4) == (const(Fraction(1, 24)) * sine,)

    def test_forced_wave_first_correction_vanishes(self, forced_wave):
        # the operator image of t*u1 cancels the forcing exactly, so
        # every correction beyond the zeroth is identically zero
        h = solve_hpm(forced_wave, 2)
        u1 = parse_expr("sin(x1)^2*cos(x2)", 2)
        assert h.corrections[0].coefficient(1) == (u1,)
        for j in (1, 2):
            for d in range(h.working_order + 1):
                assert h.corrections[j].coefficient(d) == (ZERO,)

    def test_zero_corrections_is_initial_polynomial(self, wave):
        h = solve_hpm(wave, 0)
        assert h.max_correction == 0 and len(h.corrections) == 1
        assert h.corrections[0].coefficient(0) == (parse_expr("sin(x1)", 1),)

    def test_correction_count_validation(self, wave):
        with pytest.raises(ValueError):
            solve_hpm(wave, -1)


class TestPartialSum:
    def test_wave_partial_sum(self, wave):
        h = solve_hpm(wave, 2)
        total = partial_sum(h, 5)
        sine = parse_expr("sin(x1)", 1)
        assert total.coefficient(0) == (sine,)
        assert total.coefficient(2) == (const(Fraction(-1, 2)) * sine,)
        assert total.coefficient(4) == (const(Fraction(1, 24)) * sine,)
        for d in (1, 3, 5):
            assert total.coefficient(d) == (ZERO,)

    def test_degree_zero_keeps_initial_value(self, wave):
        h = solve_hpm(wave, 2)
        total = partial_sum(h, 0)
        assert total.order == 0
        assert total.coefficient(0) == (parse_expr("sin(x1)", 1),)

    def test_one_correction_low_truncation(self, wave):
        h = solve_hpm(wave, 0)
        total = partial_sum(h, 1)
        assert total.coefficient(0) == (parse_expr("sin(x1)", 1),)
        assert total.coefficient(1) == (ZERO,)


class TestStructuralLaws:
    @given(st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=15)
    def test_minimal_degree_law(self, seed):
        # correction j has exact zeros below time degree 2j
        p, corrections = random_problem(seed)
        h = solve_hpm(p, corrections)
        for j in range(1, corrections + 1):
            for d in range(min(2 * j, h.working_order + 1)):
                assert h.corrections[j].coefficient(d) == (ZERO,) * p.m

    @given(st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=10)
    def test_finality_law(self, seed):
        # adding correction J+1 cannot change degrees <= 2J+1
        p, corrections = random_problem(seed)
        window = 2 * corrections + 1
        small = partial_sum(solve_hpm(p, corrections), window)
        large = partial_sum(solve_hpm(p, corrections + 1), window)
        for d in range(window + 1):
            for a, b in zip(small.coefficient(d), large.coefficient(d)):
                assert equal_sampled(a, b, PLAN)

    @given(st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=15)
    def test_second_derivative_matches_source(self, seed):
        # d2/dt2 u^(j) == rho^{-1}(L u^(j-1) + f when j == 1), the audit
        # that catches any mis-scaled integration
        p, corrections = random_problem(seed)
        h = solve_hpm(p, corrections)
        assert correction_audit_max_deviation(p, h, PLAN) <= PLAN.tolerance

    def test_audit_covers_golden_problems(self, wave, forced_wave):
        for p, j in ((wave, 3), (forced_wave, 2)):
            h = solve_hpm(p, j)
            assert correction_audit_max_deviation(p, h, PLAN) <= PLAN.tolerance
