"""Dispersion estimators built on squared deviations and pairwise differences.

Five estimators share this module:

* ``biased_variance``     -- mean squared deviation, denominator ``n``
* ``unbiased_variance``   -- Bessel-corrected, denominator ``n - 1``
* ``bariance_naive``      -- average squared difference over all ordered
  pairs ``i != j``; explicitly quadratic, never the scalar-sum shortcut
* ``bariance_optimized``  -- the same quantity from one pass over the data
  via the scalar sums ``sum(x)`` and ``sum(x**2)``
* ``generalized_variance`` -- sum of squared deviations divided by an
  arbitrary positive denominator ``a``

Conventions, chosen so the runtime benchmark measures what the complexity
table of each estimator says it should:

* biased/unbiased/generalized use the two-pass form (mean first, then one
  pass of squared deviations); only ``bariance_optimized`` is single-pass.
* accumulation is plain left-to-right in input order; no compensated
  summation, which would change the per-element operation count.
* ``bariance_naive`` iterates each unordered pair once and doubles the sum;
  ``bariance_naive_ordered`` walks the full ``n*(n-1)`` ordered grid and is
  the baseline timed by `bariance.bench`.

The optimized single-pass formula cancels catastrophically when the mean
dominates the spread.  The default mode is the plain formula; passing
``shifted=True`` subtracts the first element from every value before
accumulating, which is a no-op in exact arithmetic (the measure is
translation invariant) but keeps the sums small.

All functions are pure: no shared mutable state, safe to call from any
number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    EmptySample,
    InsufficientSample,
    InvalidDenominator,
    InvalidSample,
    NumericalInstability,
)

#: Rounding band below zero that is clamped to 0; anything lower raises
#: NumericalInstability.  The band scales with max(1, mean square).
CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class ScalarSums:
    """One-pass accumulator state: count, sum of values, sum of squares."""

    n: int
    sum: float
    sum_sq: float

    def __post_init__(self):
        if self.n < 1:
            raise EmptySample("scalar sums require at least one value")
        # Cauchy-Schwarz up to rounding: sum_sq >= sum^2 / n
        slack = CLAMP_TOL * max(1.0, self.sum_sq)
        if self.sum_sq < self.sum * self.sum / self.n - slack:
            raise NumericalInstability(
                f"inconsistent sums: sum_sq={self.sum_sq!r} < sum^2/n "
                f"for sum={self.sum!r}, n={self.n}"
            )


@dataclass(frozen=True)
class EstimatorKind:
    """Tag for one of the five estimator variants.

    ``a`` is only set for the generalized family; use :func:`generalized`.
    """

    label: str
    a: float | None = None

    def name(self) -> str:
        if self.label == "generalized":
            return f"generalized(a={self.a:g})"
        return self.label


BIASED = EstimatorKind("biased")
UNBIASED = EstimatorKind("unbiased")
BARIANCE_NAIVE = EstimatorKind("bariance-naive")
BARIANCE_OPT = EstimatorKind("bariance-opt")

#: Canonical ordering used for report rows and dummy-variable reference
#: levels in `bariance.inference`.
CANONICAL_KINDS = (BIASED, UNBIASED, BARIANCE_NAIVE, BARIANCE_OPT)


def generalized(a: float) -> EstimatorKind:
    """EstimatorKind for the denominator-``a`` family; requires ``a > 0``."""
    a = float(a)
    if not (a > 0.0) or not math.isfinite(a):
        raise InvalidDenominator(f"denominator must be a positive real, got {a!r}")
    return EstimatorKind("generalized", a=a)


def parse_kind(token: str) -> EstimatorKind:
    """Parse an estimator name as used on the command line.

    Accepts ``biased``, ``unbiased``, ``bariance-naive``, ``bariance-opt``
    and ``generalized:A`` for a positive denominator ``A``.
    """
    token = token.strip().lower()
    for kind in CANONICAL_KINDS:
        if token == kind.label:
            return kind
    if token.startswith("generalized:"):
        try:
            return generalized(float(token.split(":", 1)[1]))
        except ValueError as exc:
            raise InvalidDenominator(f"bad generalized denominator in {token!r}") from exc
    raise InvalidDenominator(f"unknown estimator {token!r}")


def _check_sample(values: Sequence[float], min_n: int) -> int:
    n = len(values)
    if n == 0:
        raise EmptySample("sample is empty")
    if n < min_n:
        raise InsufficientSample(f"need at least {min_n} observations, got {n}")
    for i, x in enumerate(values):
        if not math.isfinite(x):
            raise InvalidSample(f"non-finite value at index {i}: {x!r}")
    return n


def _clamp_nonnegative(raw: float, mean_square: float) -> float:
    """Clamp tiny negative rounding residue to 0; fail below the band."""
    if raw >= 0.0:
        return raw
    scale = mean_square if mean_square > 1.0 else 1.0
    if raw > -CLAMP_TOL * scale:
        return 0.0
    raise NumericalInstability(
        f"dispersion {raw!r} is negative beyond the rounding band "
        f"(scale {scale!r}); input is too ill-conditioned for the "
        "single-pass formula, try the shifted mode"
    )


def mean(values: Sequence[float]) -> float:
    """Arithmetic mean; requires at least one observation."""
    n = _check_sample(values, 1)
    total = 0.0
    for x in values:
        total += x
    return total / n


def _sum_sq_dev(values: Sequence[float], n: int) -> float:
    """Two-pass sum of squared deviations from the sample mean."""
    m = 0.0
    for x in values:
        m += x
    m /= n
    ss = 0.0
    for x in values:
        d = x - m
        ss += d * d
    return ss


def biased_variance(values: Sequence[float]) -> float:
    """Mean squared deviation with denominator ``n``."""
    n = _check_sample(values, 2)
    ss = _sum_sq_dev(values, n)
    return ss / n if ss > 0.0 else 0.0


def unbiased_variance(values: Sequence[float]) -> float:
    """Bessel-corrected sample variance, denominator ``n - 1``."""
    n = _check_sample(values, 2)
    ss = _sum_sq_dev(values, n)
    return ss / (n - 1) if ss > 0.0 else 0.0


def generalized_variance(values: Sequence[float], a: float) -> float:
    """Sum of squared deviations divided by an arbitrary ``a > 0``.

    ``a = n - 1`` reproduces :func:`unbiased_variance` bit for bit, and
    ``a = n`` reproduces :func:`biased_variance`.
    """
    n = _check_sample(values, 2)
    a = float(a)
    if not (a > 0.0) or not math.isfinite(a):
        raise InvalidDenominator(f"denominator must be a positive real, got {a!r}")
    ss = _sum_sq_dev(values, n)
    return ss / a if ss > 0.0 else 0.0


def bariance_naive(values: Sequence[float]) -> float:
    """Average squared difference over all ordered pairs ``i != j``.

    Each unordered pair is visited once and the sum doubled, so the result
    is ``2 * sum_{i<j} (x_i - x_j)**2 / (n*(n-1))``.  Deliberately O(n^2):
    this is the oracle the one-pass form is checked against.
    """
    n = _check_sample(values, 2)
    total = 0.0
    for i in range(1, n):
        xi = values[i]
        for j in range(i):
            d = xi - values[j]
            total += d * d
    return 2.0 * total / (n * (n - 1))


def bariance_naive_ordered(values: Sequence[float]) -> float:
    """Ordered-pair variant of :func:`bariance_naive`.

    Evaluates all ``n*(n-1)`` ordered pairs individually, matching the
    operation count of the quadratic estimator exactly; this is what the
    benchmark times as the naive baseline.
    """
    n = _check_sample(values, 2)
    total = 0.0
    for i in range(n):
        xi = values[i]
        for j in range(n):
            if j == i:
                continue
            d = xi - values[j]
            total += d * d
    return total / (n * (n - 1))


def scalar_sums(values: Sequence[float]) -> ScalarSums:
    """Accumulate count, sum and sum of squares in one left-to-right pass."""
    n = _check_sample(values, 1)
    s = 0.0
    ss = 0.0
    for x in values:
        s += x
        ss += x * x
    return ScalarSums(n=n, sum=s, sum_sq=ss)


def _bariance_from_sums(n: int, s: float, ss: float) -> float:
    raw = (2.0 * n * ss - 2.0 * s * s) / (n * (n - 1))
    return _clamp_nonnegative(raw, ss / n)


def bariance_from_sums(sums: ScalarSums) -> float:
    """Pairwise dispersion from precomputed scalar sums."""
    if sums.n < 2:
        raise InsufficientSample(f"need at least 2 observations, got {sums.n}")
    return _bariance_from_sums(sums.n, sums.sum, sums.sum_sq)


def bariance_optimized(values: Sequence[float], shifted: bool = False) -> float:
    """Pairwise dispersion in O(n) via the scalar sums.

    Computes ``(2*n*sum(x**2) - 2*sum(x)**2) / (n*(n-1))``, which equals
    :func:`bariance_naive` in exact arithmetic.  ``shifted=True`` subtracts
    the first element from every value before accumulating (exact under
    translation invariance, numerically far safer when ``|mean| >> spread``).
    """
    n = _check_sample(values, 2)
    s = 0.0
    ss = 0.0
    if shifted:
        base = values[0]
        for x in values:
            y = x - base
            s += y
            ss += y * y
    else:
        for x in values:
            s += x
            ss += x * x
    return _bariance_from_sums(n, s, ss)


def evaluate(kind: EstimatorKind, values: Sequence[float]) -> float:
    """Apply the estimator tagged by ``kind`` to ``values``."""
    if kind.label == "biased":
        return biased_variance(values)
    if kind.label == "unbiased":
        return unbiased_variance(values)
    if kind.label == "bariance-naive":
        return bariance_naive(values)
    if kind.label == "bariance-opt":
        return bariance_optimized(values)
    if kind.label == "generalized":
        if kind.a is None:
            raise InvalidDenominator("generalized kind is missing its denominator")
        return generalized_variance(values, kind.a)
    raise InvalidDenominator(f"unknown estimator kind {kind.label!r}")
