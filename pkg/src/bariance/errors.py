"""Exception types shared across the package.

Configuration and input problems map to CLI exit code 2, numerical
failures to exit code 3 (see `bariance.cli`).
"""


class BarianceError(Exception):
    """Base class for all errors raised by this package."""


# --- input / configuration problems ---------------------------------------

class EmptySample(BarianceError):
    """An operation that needs at least one observation got none."""


class InsufficientSample(BarianceError):
    """A dispersion estimate was requested for fewer than two observations."""


class InvalidSample(BarianceError):
    """A sample contains NaN or infinite entries."""


class InvalidDenominator(BarianceError):
    """The generalized-estimator denominator must be strictly positive."""


class InvalidVariance(BarianceError):
    """A population variance parameter must be strictly positive."""


class InvalidDistribution(BarianceError):
    """A distribution was specified with non-positive parameters."""


class ConfigError(BarianceError):
    """A study or benchmark configuration violates its invariants."""


class ParseError(BarianceError):
    """Input text could not be parsed into numbers or flags."""


class MissingEstimator(BarianceError):
    """A report lacks an estimator required by the requested check."""


class InsufficientData(BarianceError):
    """Too few values or resamples for a resampling procedure."""


class InsufficientRange(BarianceError):
    """Benchmark records do not span enough sample sizes for a slope fit."""


class MismatchedRecords(BarianceError):
    """Two record sets cannot be paired by (sample size, trial index)."""


class InsufficientObservations(BarianceError):
    """A regression has no more observations than design columns."""


# --- numerical failures ----------------------------------------------------

class NumericalInstability(BarianceError):
    """A result fell below the tolerated rounding band around zero."""


class RankDeficient(BarianceError):
    """A regression design matrix is not of full column rank."""


class DegenerateData(BarianceError):
    """Data has zero spread where positive spread is required."""


class ClockError(BarianceError):
    """No monotonic high-resolution clock is available for timing."""
