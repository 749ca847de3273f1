"""Estimator values, algebraic identities, and input validation.

Expected values come from independent oracles: hand computation for tiny
samples, `statistics.variance` (exact fractions for integer input) for the
twice-unbiased identity, and a direct ordered-pair enumeration for the
pairwise measure.
"""

import itertools
import math
import statistics

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from bariance.errors import (
    EmptySample,
    InsufficientSample,
    InvalidDenominator,
    InvalidSample,
    NumericalInstability,
)
from bariance.estimators import (
    BARIANCE_NAIVE,
    BARIANCE_OPT,
    BIASED,
    UNBIASED,
    ScalarSums,
    _clamp_nonnegative,
    bariance_from_sums,
    bariance_naive,
    bariance_naive_ordered,
    bariance_optimized,
    biased_variance,
    evaluate,
    generalized,
    generalized_variance,
    mean,
    parse_kind,
    scalar_sums,
    unbiased_variance,
)


def pairwise_oracle(values):
    """Average squared difference over ordered pairs, by direct enumeration."""
    n = len(values)
    total = sum((a - b) ** 2 for a, b in itertools.permutations(values, 2))
    return total / (n * (n - 1))


WORKED = [1.0, 3.0, 5.0, 7.0, 9.0]


class TestWorkedExample:
    def test_mean(self):
        assert mean(WORKED) == 5.0

    def test_biased(self):
        assert biased_variance(WORKED) == 8.0

    def test_unbiased(self):
        assert unbiased_variance(WORKED) == 10.0

    def test_bariance_naive(self):
        assert bariance_naive(WORKED) == 20.0

    def test_bariance_ordered(self):
        assert bariance_naive_ordered(WORKED) == 20.0

    def test_bariance_optimized(self):
        assert bariance_optimized(WORKED) == 20.0

    def test_scalar_sums(self):
        sums = scalar_sums(WORKED)
        assert (sums.n, sums.sum, sums.sum_sq) == (5, 25.0, 165.0)
        assert bariance_from_sums(sums) == 20.0

    def test_generalized_denominators(self):
        assert generalized_variance(WORKED, 4) == 10.0
        assert generalized_variance(WORKED, 5) == 8.0
        assert generalized_variance(WORKED, 8) == 5.0


class TestHandComputedValues:
    def test_mean_single_and_symmetric(self):
        assert mean([3.5]) == 3.5
        assert mean([-2.0, 2.0]) == 0.0

    def test_constant_samples_have_zero_dispersion(self):
        const = [7.0, 7.0, 7.0]
        for func in (biased_variance, unbiased_variance, bariance_naive,
                     bariance_naive_ordered, bariance_optimized):
            assert func(const) == 0.0

    def test_two_point_sample(self):
        # deviations are +-1: biased 2/2=1, unbiased 2/1=2
        assert biased_variance([0.0, 2.0]) == 1.0
        assert unbiased_variance([0.0, 2.0]) == 2.0

    def test_even_grid_sample(self):
        # unordered pairwise sum is 200, ordered 400, over n(n-1)=20
        xs = [2.0, 4.0, 6.0, 8.0, 10.0]
        assert bariance_naive(xs) == 20.0
        assert bariance_optimized(xs) == 20.0


class TestBruteForceEnumeration:
    def test_small_integer_samples(self):
        """Optimized form equals the enumerated pairwise average on every
        sample of length 2..6 with entries in {-2..2}."""
        entries = (-2.0, -1.0, 0.0, 1.0, 2.0)
        for length in range(2, 7):
            for values in itertools.product(entries, repeat=length):
                oracle = pairwise_oracle(values)
                assert bariance_optimized(values) == pytest.approx(
                    oracle, abs=1e-12, rel=1e-12
                )
                assert bariance_naive(values) == pytest.approx(
                    oracle, abs=1e-12, rel=1e-12
                )

    def test_twice_unbiased_against_stdlib(self):
        for values in ([1, 3, 5, 7, 9], [2, 4, 6, 8, 10], [0, 2], [5, 5, 6],
                       [-3, 1, 4, 4, 9, 11]):
            expected = 2 * statistics.variance(values)
            got = bariance_naive([float(v) for v in values])
            assert got == pytest.approx(expected, rel=1e-12)


# well-conditioned float samples: spread not vanishing relative to magnitude,
# so the two-pass mean subtraction stays accurate enough for tight tolerances
def _conditioned(xs):
    spread = max(xs) - min(xs)
    scale = max(1.0, max(abs(x) for x in xs))
    return spread == 0.0 or spread >= 0.05 * scale


sample_lists = st.lists(
    st.floats(min_value=-100.0, max_value=100.0, allow_nan=False),
    min_size=2, max_size=40,
)


class TestAlgebraicIdentities:
    @given(sample_lists)
    def test_naive_is_twice_unbiased(self, xs):
        assume(_conditioned(xs))
        naive = bariance_naive(xs)
        # the absolute cushion covers eps^2-scale residue on constant samples
        slack = 1e-20 * max(1.0, max(abs(x) for x in xs)) ** 2
        assert abs(naive - 2.0 * unbiased_variance(xs)) <= 1e-12 * abs(naive) + slack

    @given(sample_lists)
    def test_naive_matches_optimized(self, xs):
        assume(_conditioned(xs))
        naive = bariance_naive(xs)
        opt = bariance_optimized(xs)
        assert abs(naive - opt) <= 1e-9 + 1e-9 * abs(naive)

    @given(sample_lists)
    def test_ordered_matches_unordered(self, xs):
        assume(_conditioned(xs))
        naive = bariance_naive(xs)
        assert bariance_naive_ordered(xs) == pytest.approx(naive, rel=1e-12, abs=1e-12)

    @given(sample_lists)
    def test_biased_unbiased_ratio(self, xs):
        n = len(xs)
        expected = (n - 1) / n * unbiased_variance(xs)
        assert biased_variance(xs) == pytest.approx(expected, rel=1e-12, abs=1e-300)

    @given(sample_lists, st.floats(min_value=-1000.0, max_value=1000.0))
    def test_translation_invariance(self, xs, c):
        assume(_conditioned(xs))
        shifted_xs = [x + c for x in xs]
        base = bariance_naive(xs)
        assert abs(bariance_naive(shifted_xs) - base) <= 1e-9 + 1e-9 * abs(base)
        stable = bariance_optimized(shifted_xs, shifted=True)
        assert abs(stable - base) <= 1e-9 + 1e-9 * abs(base)

    @given(sample_lists, st.floats(min_value=0.001, max_value=1000.0))
    def test_scale_equivariance(self, xs, c):
        assume(_conditioned(xs))
        scaled = [c * x for x in xs]
        for func in (biased_variance, unbiased_variance, bariance_naive,
                     bariance_optimized):
            base = func(xs)
            assert abs(func(scaled) - c * c * base) <= 1e-12 * max(
                abs(c * c * base), 1e-300
            ) + 1e-280

    @given(sample_lists)
    def test_generalized_bit_matches_named_forms(self, xs):
        n = len(xs)
        assert generalized_variance(xs, float(n - 1)) == unbiased_variance(xs)
        assert generalized_variance(xs, float(n)) == biased_variance(xs)

    @given(sample_lists)
    def test_all_outputs_nonnegative(self, xs):
        for func in (biased_variance, unbiased_variance, bariance_naive,
                     bariance_naive_ordered, bariance_optimized):
            assert func(xs) >= 0.0

    @given(sample_lists)
    def test_optimized_matches_sums_path(self, xs):
        assert bariance_from_sums(scalar_sums(xs)) == bariance_optimized(xs)


class TestClampingAndStability:
    def test_tiny_negative_residue_clamps_to_zero(self):
        assert _clamp_nonnegative(-1e-20, 1.0) == 0.0
        assert _clamp_nonnegative(-1e-8, 1e8) == 0.0

    def test_gross_negative_raises(self):
        with pytest.raises(NumericalInstability):
            _clamp_nonnegative(-1.0, 1.0)

    def test_scalar_sums_reject_inconsistent_state(self):
        with pytest.raises(NumericalInstability):
            ScalarSums(n=2, sum=10.0, sum_sq=1.0)

    def test_shifted_mode_survives_huge_offset(self):
        xs = [1e9 + v for v in WORKED]
        assert bariance_optimized(xs, shifted=True) == pytest.approx(20.0, rel=1e-9)


class TestValidation:
    def test_empty_sample(self):
        with pytest.raises(EmptySample):
            mean([])
        with pytest.raises(EmptySample):
            biased_variance([])

    def test_insufficient_sample(self):
        for func in (biased_variance, unbiased_variance, bariance_naive,
                     bariance_naive_ordered, bariance_optimized):
            with pytest.raises(InsufficientSample):
                func([1.0])
        with pytest.raises(InsufficientSample):
            generalized_variance([1.0], 1.0)

    def test_non_finite_values(self):
        with pytest.raises(InvalidSample):
            mean([1.0, float("nan")])
        with pytest.raises(InvalidSample):
            bariance_optimized([1.0, float("inf")])

    def test_bad_denominator(self):
        for a in (0.0, -1.0, float("nan")):
            with pytest.raises(InvalidDenominator):
                generalized_variance(WORKED, a)
        with pytest.raises(InvalidDenominator):
            generalized(0.0)


class TestKinds:
    def test_evaluate_dispatch(self):
        assert evaluate(BIASED, WORKED) == 8.0
        assert evaluate(UNBIASED, WORKED) == 10.0
        assert evaluate(BARIANCE_NAIVE, WORKED) == 20.0
        assert evaluate(BARIANCE_OPT, WORKED) == 20.0
        assert evaluate(generalized(8.0), WORKED) == 5.0

    def test_parse_kind(self):
        assert parse_kind("unbiased") is UNBIASED
        assert parse_kind("bariance-opt") is BARIANCE_OPT
        kind = parse_kind("generalized:6.5")
        assert kind.a == 6.5 and kind.name() == "generalized(a=6.5)"
        with pytest.raises(InvalidDenominator):
            parse_kind("median")
        with pytest.raises(InvalidDenominator):
            parse_kind("generalized:-2")

    def test_names(self):
        assert BIASED.name() == "biased"
        assert math.isclose(generalized(4.0).a, 4.0)
