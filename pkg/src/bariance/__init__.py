"""Dispersion estimation from pairwise squared differences.

The pairwise measure ("bariance") averages the squared difference over
all ordered pairs of observations and equals exactly twice the unbiased
sample variance; its scalar-sum form computes it in linear time.  The
package bundles the estimators, their closed-form bias/variance/MSE
theory under a free denominator, a seedable Monte Carlo study harness,
and a wall-clock benchmark suite, all driven by the ``bariance`` CLI.
"""

from .errors import BarianceError
from .estimators import (
    BARIANCE_NAIVE,
    BARIANCE_OPT,
    BIASED,
    UNBIASED,
    EstimatorKind,
    ScalarSums,
    bariance_from_sums,
    bariance_naive,
    bariance_naive_ordered,
    bariance_optimized,
    biased_variance,
    evaluate,
    generalized,
    generalized_variance,
    mean,
    scalar_sums,
    unbiased_variance,
)
from .randgen import DistributionSpec, RngState, child_seed, moments, sample
from .theory import (
    TheoreticalMoments,
    bariance_property_table,
    optimal_denominator_closed_form,
    optimal_denominator_numeric,
    theoretical_bias,
    theoretical_mse,
    theoretical_variance,
)

__all__ = [
    "BARIANCE_NAIVE",
    "BARIANCE_OPT",
    "BIASED",
    "UNBIASED",
    "BarianceError",
    "DistributionSpec",
    "EstimatorKind",
    "RngState",
    "ScalarSums",
    "TheoreticalMoments",
    "bariance_from_sums",
    "bariance_naive",
    "bariance_naive_ordered",
    "bariance_optimized",
    "bariance_property_table",
    "biased_variance",
    "child_seed",
    "evaluate",
    "generalized",
    "generalized_variance",
    "mean",
    "moments",
    "optimal_denominator_closed_form",
    "optimal_denominator_numeric",
    "sample",
    "scalar_sums",
    "theoretical_bias",
    "theoretical_mse",
    "theoretical_variance",
    "unbiased_variance",
]

__version__ = "0.1.0"
