"""Supporting statistical machinery for the runtime studies.

* ordinary least squares with dummy indicators for estimator kind and
  sample-size level (the runtime regression),
* two-sided Student-t tail probabilities via the regularized incomplete
  beta function (needed by the paired runtime tests),
* Gaussian kernel density estimates with the Silverman bandwidth (report
  output for runtime-difference distributions).

Everything here operates on immutable inputs and is thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateData,
    InsufficientObservations,
    RankDeficient,
)
from .estimators import CANONICAL_KINDS

# --------------------------------------------------------------------------
# fixed-effects OLS
# --------------------------------------------------------------------------

_CANONICAL_LABELS = [kind.label for kind in CANONICAL_KINDS]


@dataclass(frozen=True)
class DesignMatrix:
    """Intercept-plus-dummies design with its response vector."""

    columns: list[str]
    matrix: np.ndarray
    response: np.ndarray


@dataclass(frozen=True)
class RegressionFit:
    """OLS point estimates with classical (homoskedastic) standard errors."""

    columns: list[str]
    coefficients: np.ndarray
    standard_errors: np.ndarray
    r_squared: float
    n_obs: int
    residuals: np.ndarray = field(repr=False)

    def coefficient(self, column: str) -> float:
        return float(self.coefficients[self.columns.index(column)])


def _estimator_level_order(labels: set[str]) -> list[str]:
    """Canonical estimator order first, anything unknown alphabetically after."""
    ordered = [lbl for lbl in _CANONICAL_LABELS if lbl in labels]
    ordered += sorted(labels - set(_CANONICAL_LABELS))
    return ordered


def benchmark_design(rows: Sequence[tuple[str, int, float]]) -> DesignMatrix:
    """Design matrix for regressing runtime on estimator and sample size.

    ``rows`` are (estimator label, n, elapsed nanoseconds) observations.
    One dummy column per estimator level and per sample-size level, with
    the first estimator in canonical order and the smallest sample size
    dropped as the reference category absorbed by the intercept.
    """
    if not rows:
        raise InsufficientObservations("no observations")
    est_levels = _estimator_level_order({r[0] for r in rows})
    n_levels = sorted({r[1] for r in rows})
    est_dummies = est_levels[1:]
    n_dummies = n_levels[1:]
    columns = (["intercept"]
               + [f"estimator[{lbl}]" for lbl in est_dummies]
               + [f"n[{lvl}]" for lvl in n_dummies])
    mat = np.zeros((len(rows), len(columns)))
    y = np.empty(len(rows))
    mat[:, 0] = 1.0
    est_index = {lbl: 1 + i for i, lbl in enumerate(est_dummies)}
    n_index = {lvl: 1 + len(est_dummies) + i for i, lvl in enumerate(n_dummies)}
    for r, (label, n, elapsed) in enumerate(rows):
        if label in est_index:
            mat[r, est_index[label]] = 1.0
        if n in n_index:
            mat[r, n_index[n]] = 1.0
        y[r] = float(elapsed)
    return DesignMatrix(columns=columns, matrix=mat, response=y)


def ols_fit(design: DesignMatrix) -> RegressionFit:
    """Solve the normal equations through a QR decomposition.

    Residuals stay orthogonal to every design column to tight tolerance,
    which is the property the dummy designs here are tested against;
    explicit normal-equation inversion would not guarantee that.
    """
    x = np.asarray(design.matrix, dtype=float)
    y = np.asarray(design.response, dtype=float)
    n_obs, k = x.shape
    if n_obs <= k:
        raise InsufficientObservations(
            f"{n_obs} observations cannot identify {k} coefficients"
        )
    q, r = np.linalg.qr(x)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-10 * max(diag.max(), 1.0):
        raise RankDeficient("design matrix is rank deficient after dropping references")
    beta = np.linalg.solve(r, q.T @ y)
    resid = y - x @ beta
    ssr = float(resid @ resid)
    sst = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - ssr / sst if sst > 0.0 else 0.0
    sigma2 = ssr / (n_obs - k)
    r_inv = np.linalg.inv(r)
    cov = sigma2 * (r_inv @ r_inv.T)
    return RegressionFit(
        columns=list(design.columns),
        coefficients=beta,
        standard_errors=np.sqrt(np.diag(cov)),
        r_squared=r_squared,
        n_obs=n_obs,
        residuals=resid,
    )


# --------------------------------------------------------------------------
# Student-t tail probabilities
# --------------------------------------------------------------------------

_BETACF_MAX_ITER = 10_000
_BETACF_EPS = 3e-16
_BETACF_FPMIN = 1e-300


def _stirling_delta(z: float) -> float:
    """lnGamma(z) minus its Stirling main term, for z >= 30."""
    zinv = 1.0 / z
    zinv2 = zinv * zinv
    return zinv * (1.0 / 12.0 + zinv2 * (-1.0 / 360.0 + zinv2 * (
        1.0 / 1260.0 + zinv2 * (-1.0 / 1680.0 + zinv2 / 1188.0))))


def _ln_beta(a: float, b: float) -> float:
    """ln B(a, b), stable for one huge and one moderate argument.

    The naive lgamma(a) + lgamma(b) - lgamma(a+b) loses ~a*eps absolute
    accuracy for large a; rewriting the lgamma ratio around Stirling's
    expansion keeps every term O(1)-conditioned.
    """
    if a < b:
        a, b = b, a
    if a < 30.0:
        return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    return (math.lgamma(b) - b * math.log(a) + b
            - (a + b - 0.5) * math.log1p(b / a)
            + _stirling_delta(a) - _stirling_delta(a + b))


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETACF_FPMIN:
        d = _BETACF_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_FPMIN:
            d = _BETACF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETACF_FPMIN:
            c = _BETACF_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_FPMIN:
            d = _BETACF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETACF_FPMIN:
            c = _BETACF_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETACF_EPS:
            break
    return h


def _reg_inc_beta(a: float, b: float, x: float, cx: float) -> float:
    """Regularized incomplete beta I_x(a, b); ``cx`` is 1 - x computed
    without cancellation by the caller.

    The continued fraction converges fastest when its argument is below
    (first shape + 1)/(a + b + 2); whichever side of the symmetry relation
    satisfies that is used.  When neither does (x just below the direct
    threshold with a >> b), the direct side is the less slow one.
    """
    if x <= 0.0:
        return 0.0
    if cx <= 0.0:
        return 1.0
    ln_x = math.log1p(-cx) if cx < 0.5 else math.log(x)
    ln_cx = math.log1p(-x) if x < 0.5 else math.log(cx)
    bt = math.exp(a * ln_x + b * ln_cx - _ln_beta(a, b))
    if cx < (b + 1.0) / (a + b + 2.0):
        return 1.0 - bt * _betacf(b, a, cx) / b
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, cx) / b


def t_tail(t: float, dof: int) -> float:
    """Two-sided tail probability P(|T| >= |t|) for Student's t."""
    if dof < 1:
        raise InsufficientObservations(f"degrees of freedom must be >= 1, got {dof}")
    if t == 0.0:
        return 1.0
    if math.isinf(t):
        return 0.0
    t2 = t * t
    x = dof / (dof + t2)
    cx = t2 / (dof + t2)
    return _reg_inc_beta(0.5 * dof, 0.5, x, cx)


def t_critical(level: float, dof: int) -> float:
    """Two-sided critical value: t with P(|T| >= t) = 1 - level."""
    alpha = 1.0 - level
    if not (0.0 < alpha < 1.0):
        raise DegenerateData(f"confidence level must be in (0, 1), got {level!r}")
    hi = 1.0
    while t_tail(hi, dof) > alpha:
        hi *= 2.0
        if hi > 1e308:
            break
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t_tail(mid, dof) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# kernel density estimation
# --------------------------------------------------------------------------

def silverman_bandwidth(values: Sequence[float]) -> float:
    """0.9 * min(sd, IQR/1.34) * n**(-1/5), skipping a zero IQR.

    Raises DegenerateData when the sample has no spread at all.
    """
    data = np.asarray(values, dtype=float)
    n = data.size
    if n < 2:
        raise DegenerateData(f"need at least 2 values, got {n}")
    sd = float(np.std(data, ddof=1))
    if sd == 0.0:
        raise DegenerateData("values have zero spread")
    q1, q3 = np.quantile(data, [0.25, 0.75])
    iqr = float(q3 - q1)
    spread = min(sd, iqr / 1.34) if iqr > 0.0 else sd
    return 0.9 * spread * n ** (-0.2)


def kde_grid(values: Sequence[float], points: int = 512) -> np.ndarray:
    """Evaluation grid spanning the data range padded by 4 bandwidths."""
    data = np.asarray(values, dtype=float)
    h = silverman_bandwidth(data)
    return np.linspace(data.min() - 4.0 * h, data.max() + 4.0 * h, points)


def kde(values: Sequence[float], grid: Sequence[float]) -> np.ndarray:
    """Gaussian-kernel density of ``values`` evaluated at ``grid``."""
    data = np.asarray(values, dtype=float)
    pts = np.asarray(grid, dtype=float)
    h = silverman_bandwidth(data)
    z = (pts[:, None] - data[None, :]) / h
    dens = np.exp(-0.5 * z * z).mean(axis=1) / (h * math.sqrt(2.0 * math.pi))
    return dens
