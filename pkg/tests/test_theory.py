"""Closed-form moment formulas and the optimal-denominator search."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bariance.errors import InsufficientSample, InvalidDenominator, InvalidVariance
from bariance.theory import (
    bariance_property_table,
    golden_section_minimize,
    optimal_denominator_closed_form,
    optimal_denominator_numeric,
    theoretical_bias,
    theoretical_mse,
    theoretical_variance,
)


class TestBias:
    def test_unbiased_at_n_minus_1(self):
        assert theoretical_bias(5, 4, 10.0) == 0.0

    def test_divide_by_n(self):
        bias = theoretical_bias(5, 5, 10.0)
        assert bias == pytest.approx(-2.0)
        assert bias * bias == pytest.approx(4.0)

    def test_overshoot(self):
        assert theoretical_bias(5, 6, 10.0) == pytest.approx(-10.0 / 3.0)

    def test_exact_zero_for_all_n(self):
        for n in range(2, 200):
            assert theoretical_bias(n, float(n - 1), 3.7) == 0.0


class TestVariance:
    def test_values(self):
        assert theoretical_variance(5, 4, 10.0) == pytest.approx(50.0)
        assert theoretical_variance(5, 10, 10.0) == pytest.approx(8.0)
        assert theoretical_variance(2, 1, 1.0) == pytest.approx(2.0)

    def test_positive(self):
        for n in (2, 5, 100):
            for a in (0.5, 1.0, 7.3):
                assert theoretical_variance(n, a, 2.0) > 0.0


class TestMse:
    def test_composition(self):
        m = theoretical_mse(5, 4, 10.0)
        assert m.mse == m.bias_sq + m.variance  # exact by construction
        assert m.mse == pytest.approx(50.0)

    def test_value_at_a6(self):
        m = theoretical_mse(5, 6, 10.0)
        assert m.mse == pytest.approx(100.0 / 9.0 + 800.0 / 36.0)
        assert m.mse == pytest.approx(33.3333, abs=1e-3)

    def test_large_a_limit(self):
        m = theoretical_mse(5, 1e12, 10.0)
        assert m.mse == pytest.approx(100.0, rel=1e-6)  # estimator -> 0, bias -> -sigma2

    @given(st.integers(min_value=2, max_value=500),
           st.floats(min_value=0.1, max_value=50.0),
           st.floats(min_value=0.01, max_value=100.0))
    def test_homogeneity_in_sigma2(self, n, a_frac, sigma2):
        a = a_frac * n
        base = theoretical_mse(n, a, 1.0).mse
        scaled = theoretical_mse(n, a, sigma2).mse
        assert scaled == pytest.approx(base * sigma2 * sigma2, rel=1e-12)

    def test_divide_by_n_beats_bessel(self):
        for n in range(2, 1001):
            assert theoretical_mse(n, n, 1.0).mse < theoretical_mse(n, n - 1, 1.0).mse


class TestOptimalDenominator:
    def test_closed_form(self):
        assert optimal_denominator_closed_form(5) == 6.0
        assert optimal_denominator_closed_form(2) == 3.0
        assert optimal_denominator_closed_form(100) == 101.0

    def test_numeric_matches_closed_form(self):
        for n in (2, 3, 5, 10, 37, 100, 541, 1000):
            for sigma2 in (0.1, 1.0, 10.0):
                a_star = optimal_denominator_numeric(n, sigma2)
                assert a_star == pytest.approx(n + 1, abs=1e-6)

    def test_numeric_independent_of_sigma2(self):
        lo = optimal_denominator_numeric(5, 1.0)
        hi = optimal_denominator_numeric(5, 10.0)
        assert lo == pytest.approx(hi, abs=1e-7)

    def test_fine_grid_argmin_oracle(self):
        # independent check: dense scan around the optimum
        for n in (5, 12):
            grid = [n + 1 + step * 1e-3 for step in range(-2000, 2001)]
            best = min(grid, key=lambda a: theoretical_mse(n, a, 1.0).mse)
            assert best == pytest.approx(optimal_denominator_numeric(n, 1.0), abs=2e-3)

    def test_global_minimum_on_coarse_grid(self):
        for n in (2, 5, 17):
            opt = theoretical_mse(n, n + 1.0, 1.0).mse
            a = 0.1
            while a <= 10.0 * n + 1e-9:
                assert opt <= theoretical_mse(n, a, 1.0).mse + 1e-15
                a = round(a + 0.1, 10)

    def test_golden_section_on_parabola(self):
        assert golden_section_minimize(lambda x: (x - 3.25) ** 2, 0.0, 10.0,
                                       tol=1e-10) == pytest.approx(3.25, abs=1e-8)


class TestPropertyTable:
    def test_standard_normal_n100(self):
        unbiased, bariance = bariance_property_table(1.0, 100)
        assert unbiased.variance == pytest.approx(2.0 / 99.0)
        assert unbiased.bias == 0.0 and unbiased.mse == unbiased.variance
        assert bariance.bias == 1.0
        assert bariance.variance == pytest.approx(8.0 / 99.0)
        assert bariance.mse == pytest.approx(8.0 / 99.0 + 1.0)

    def test_mse_structure_for_any_sigma(self):
        unbiased, bariance = bariance_property_table(8.0, 100)
        assert bariance.variance == 4.0 * unbiased.variance
        assert bariance.mse == bariance.variance + 64.0

    def test_smallest_n(self):
        unbiased, bariance = bariance_property_table(1.0, 2)
        assert unbiased.variance == pytest.approx(2.0)
        assert bariance.variance == pytest.approx(8.0)


class TestValidation:
    def test_small_n(self):
        with pytest.raises(InsufficientSample):
            theoretical_bias(1, 1.0, 1.0)
        with pytest.raises(InsufficientSample):
            optimal_denominator_closed_form(1)

    def test_bad_denominator(self):
        with pytest.raises(InvalidDenominator):
            theoretical_variance(5, 0.0, 1.0)

    def test_bad_variance(self):
        with pytest.raises(InvalidVariance):
            theoretical_mse(5, 4.0, -1.0)
