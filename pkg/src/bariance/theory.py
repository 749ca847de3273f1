"""Closed-form bias, variance and MSE of the denominator-``a`` estimator
family under normal sampling, and the MSE-minimizing denominator.

For i.i.d. normal data with population variance ``sigma2``, dividing the
sum of squared deviations by ``a`` gives

    bias(a)     = ((n - 1 - a) / a) * sigma2
    variance(a) = 2 * (n - 1) * sigma2**2 / a**2
    mse(a)      = bias(a)**2 + variance(a)

The first-order condition of ``mse`` has the exact solution ``a = n + 1``:
with ``m = n - 1`` and ``d = m - a`` the stationarity equation reduces to
``d*m + 2*m = 0``, i.e. ``d = -2``.  The numeric minimizer exists as an
independent cross-check and uses golden-section search rather than
root-finding on the messy quotient-rule derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import InsufficientSample, InvalidDenominator, InvalidVariance

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0

#: Bracket for the numeric minimizer: [0.5, 10n] contains n + 1 with wide
#: margin for every n >= 2.
BRACKET_LO = 0.5
BRACKET_SCALE = 10.0


@dataclass(frozen=True)
class TheoreticalMoments:
    """Bias (units of sigma2), its square, variance and MSE (units sigma2^2)."""

    bias: float
    bias_sq: float
    variance: float
    mse: float


def _validate(n: int, a: float, sigma2: float) -> None:
    if n < 2:
        raise InsufficientSample(f"need n >= 2, got {n}")
    if not (a > 0.0) or not math.isfinite(a):
        raise InvalidDenominator(f"denominator must be positive, got {a!r}")
    if not (sigma2 > 0.0) or not math.isfinite(sigma2):
        raise InvalidVariance(f"population variance must be positive, got {sigma2!r}")


def theoretical_bias(n: int, a: float, sigma2: float) -> float:
    """Expected estimate minus the true variance: ((n-1-a)/a) * sigma2."""
    _validate(n, a, sigma2)
    return (n - 1 - a) / a * sigma2


def theoretical_variance(n: int, a: float, sigma2: float) -> float:
    """Sampling variance of the estimate: 2*(n-1)*sigma2^2 / a^2."""
    _validate(n, a, sigma2)
    return 2.0 * (n - 1) * sigma2 * sigma2 / (a * a)


def theoretical_mse(n: int, a: float, sigma2: float) -> TheoreticalMoments:
    """All four moments; ``mse`` is ``bias_sq + variance`` by construction."""
    bias = theoretical_bias(n, a, sigma2)
    variance = theoretical_variance(n, a, sigma2)
    bias_sq = bias * bias
    return TheoreticalMoments(bias=bias, bias_sq=bias_sq, variance=variance,
                              mse=bias_sq + variance)


def optimal_denominator_closed_form(n: int) -> float:
    """The exact MSE-minimizing denominator, ``n + 1``."""
    if n < 2:
        raise InsufficientSample(f"need n >= 2, got {n}")
    return float(n + 1)


def golden_section_minimize(fn: Callable[[float], float], lo: float, hi: float,
                            tol: float = 1e-8) -> float:
    """Minimizer of a unimodal ``fn`` on [lo, hi], located to within ``tol``."""
    lo, hi = min(lo, hi), max(lo, hi)
    h = hi - lo
    if h <= tol:
        return 0.5 * (lo + hi)
    steps = int(math.ceil(math.log(tol / h) / math.log(_INV_PHI)))
    c = lo + _INV_PHI_SQ * h
    d = lo + _INV_PHI * h
    yc = fn(c)
    yd = fn(d)
    for _ in range(steps - 1):
        h *= _INV_PHI
        if yc < yd:
            hi = d
            d = c
            yd = yc
            c = lo + _INV_PHI_SQ * h
            yc = fn(c)
        else:
            lo = c
            c = d
            yc = yd
            d = lo + _INV_PHI * h
            yd = fn(d)
    if yc < yd:
        return 0.5 * (lo + d)
    return 0.5 * (c + hi)


def optimal_denominator_numeric(n: int, sigma2: float) -> float:
    """Argmin of the closed-form MSE over a in [0.5, 10n].

    Agrees with :func:`optimal_denominator_closed_form` to well below 1e-6
    and does not depend on ``sigma2``, which only scales the objective.
    """
    _validate(n, 1.0, sigma2)
    return golden_section_minimize(
        lambda a: theoretical_mse(n, a, sigma2).mse,
        BRACKET_LO, BRACKET_SCALE * n, tol=1e-8,
    )


def bariance_property_table(sigma2: float, n: int) -> tuple[TheoreticalMoments, TheoreticalMoments]:
    """Moments of the unbiased variance and of the pairwise measure.

    The pairwise measure equals twice the unbiased variance, so its bias
    against ``sigma2`` is ``sigma2`` itself, its variance is four times
    ``Var = 2*sigma2^2/(n-1)``, and its MSE adds ``sigma2^2`` on top.
    """
    _validate(n, 1.0, sigma2)
    var_unbiased = 2.0 * sigma2 * sigma2 / (n - 1)
    unbiased = TheoreticalMoments(bias=0.0, bias_sq=0.0, variance=var_unbiased,
                                  mse=var_unbiased)
    var_bariance = 4.0 * var_unbiased
    bariance = TheoreticalMoments(bias=sigma2, bias_sq=sigma2 * sigma2,
                                  variance=var_bariance,
                                  mse=var_bariance + sigma2 * sigma2)
    return unbiased, bariance
