"""Replication engine for the estimator-performance studies.

Runs tau independent replications, each drawing one sample of size n from
a configured population and evaluating every requested estimator on that
same sample, then aggregates bias/variance/MSE against the population
variance.  Also hosts the denominator sweep with bootstrap confidence
intervals, the pairwise-measure identity checks, and the naive-vs-
optimized equivalence study.

Conventions:

* the variance of the replicate estimates uses the 1/tau divisor so that
  ``mse = bias**2 + variance`` holds as a definitional identity (it would
  be off by tau/(tau-1) with the sample-variance divisor);
* bootstrap intervals use the percentile method on with-replacement
  resamples of the replicate vector;
* replication r and sweep-row i draw from child seeds derived with
  `randgen.child_seed`, so replications are order-independent and rows
  are mutually independent.  Aggregation happens in replication order,
  making reports bit-reproducible for a fixed configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InsufficientData, MissingEstimator
from .estimators import (
    EstimatorKind,
    bariance_naive,
    bariance_optimized,
    evaluate,
    generalized_variance,
)
from .randgen import DistributionSpec, RngState, child_seed, moments, sample
from .theory import TheoreticalMoments, theoretical_mse


@dataclass(frozen=True)
class StudyConfig:
    """Parameters of one replication study."""

    dist: DistributionSpec
    n: int
    tau: int
    seed: int
    estimators: tuple[EstimatorKind, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"sample size must be >= 2, got {self.n}")
        if self.tau < 2:
            raise ConfigError(
                f"replication count must be >= 2 (variance undefined), got {self.tau}"
            )
        if not self.estimators:
            raise ConfigError("at least one estimator is required")


@dataclass(frozen=True)
class MetricSet:
    """Aggregated performance of one estimator across replications."""

    point_mean: float
    bias: float
    bias_sq: float
    variance: float
    mse: float
    ci: dict[str, tuple[float, float]] | None = None
    se: dict[str, float] | None = None


@dataclass(frozen=True)
class StudyReport:
    """Per-estimator metrics plus the replicate vectors they came from."""

    config: StudyConfig
    target_variance: float
    metrics: dict[str, MetricSet]
    replicates: dict[str, list[float]] = field(repr=False)


@dataclass(frozen=True)
class IdentityCheck:
    """Deviations of a paired report from the pairwise-measure identities.

    ``var_ratio`` is Var(pairwise)/Var(unbiased), which must be 4 up to
    rounding; ``var_ratio_deviation`` is its relative deviation from 4.
    """

    var_ratio: float
    var_ratio_deviation: float
    mse_relative_deviation: float


@dataclass(frozen=True)
class BootstrapConfig:
    resamples: int = 200
    level: float = 0.95

    def __post_init__(self):
        if self.resamples < 2:
            raise ConfigError(f"need >= 2 resamples, got {self.resamples}")
        if not (0.0 < self.level < 1.0):
            raise ConfigError(f"level must be in (0, 1), got {self.level!r}")


@dataclass(frozen=True)
class SweepRow:
    """One denominator value of the MSE sweep."""

    a: float
    flagged: bool  # a is n-1, n, or n+1
    metrics: MetricSet
    theory: TheoreticalMoments


@dataclass(frozen=True)
class EquivalenceRow:
    """Naive vs optimized pairwise measure at one sample size."""

    n: int
    mean_naive: float
    mean_optimized: float
    max_abs_diff: float
    passed: bool
    naive_values: list[float] = field(repr=False, default_factory=list)


def _aggregate(values: list[float], target: float) -> MetricSet:
    tau = len(values)
    total = 0.0
    for v in values:
        total += v
    point_mean = total / tau
    bias = point_mean - target
    var_acc = 0.0
    mse_acc = 0.0
    for v in values:
        d = v - point_mean
        var_acc += d * d
        e = v - target
        mse_acc += e * e
    return MetricSet(
        point_mean=point_mean,
        bias=bias,
        bias_sq=bias * bias,
        variance=var_acc / tau,
        mse=mse_acc / tau,
    )


def run_study(config: StudyConfig) -> StudyReport:
    """Run tau replications and aggregate each estimator's performance.

    Every estimator sees the same replicate samples, so identities that
    hold sample-by-sample (the pairwise measure being twice the unbiased
    variance) propagate exactly to the aggregates.
    """
    target = moments(config.dist)[1]
    names = [kind.name() for kind in config.estimators]
    replicates: dict[str, list[float]] = {name: [] for name in names}
    for r in range(config.tau):
        rng = RngState(child_seed(config.seed, r))
        xs = sample(config.dist, config.n, rng)
        for kind, name in zip(config.estimators, names):
            replicates[name].append(evaluate(kind, xs))
    metrics = {name: _aggregate(vals, target) for name, vals in replicates.items()}
    return StudyReport(config=config, target_variance=target,
                       metrics=metrics, replicates=replicates)


def verify_bariance_identities(report: StudyReport) -> IdentityCheck:
    """Check Var(pairwise) = 4 Var(unbiased) and the matching MSE identity.

    Requires the report to contain the unbiased estimator together with
    either form of the pairwise measure, evaluated on the same replicate
    samples.  Because each replicate's pairwise value is exactly twice its
    unbiased variance, the variance ratio must be 4 up to rounding and the
    MSE must decompose as 4*Var(unbiased) + bias**2.
    """
    if "unbiased" not in report.metrics:
        raise MissingEstimator("report does not include the unbiased estimator")
    bariance_name = next(
        (name for name in ("bariance-naive", "bariance-opt") if name in report.metrics),
        None,
    )
    if bariance_name is None:
        raise MissingEstimator("report does not include a pairwise estimator")
    unbiased = report.metrics["unbiased"]
    bar = report.metrics[bariance_name]
    ratio = bar.variance / unbiased.variance
    expected_mse = 4.0 * unbiased.variance + bar.bias_sq
    return IdentityCheck(
        var_ratio=ratio,
        var_ratio_deviation=ratio / 4.0 - 1.0,
        mse_relative_deviation=(bar.mse - expected_mse) / expected_mse,
    )


# --------------------------------------------------------------------------
# bootstrap
# --------------------------------------------------------------------------

_STATISTICS = ("mean", "variance", "bias_sq", "mse")


def _bootstrap_stats(values, statistic: str, resamples: int, seed: int,
                     target: float | None) -> np.ndarray:
    if len(values) < 2:
        raise InsufficientData(f"need >= 2 values, got {len(values)}")
    if resamples < 2:
        raise InsufficientData(f"need >= 2 resamples, got {resamples}")
    if statistic not in _STATISTICS:
        raise ConfigError(f"unknown statistic {statistic!r}; one of {_STATISTICS}")
    if statistic in ("bias_sq", "mse") and target is None:
        raise ConfigError(f"statistic {statistic!r} needs a target value")
    data = np.asarray(values, dtype=float)
    tau = data.size
    rng = RngState(seed)
    next_uint64 = rng.next_uint64
    idx = np.fromiter(
        ((next_uint64() * tau) >> 64 for _ in range(resamples * tau)),
        dtype=np.int64, count=resamples * tau,
    ).reshape(resamples, tau)
    resampled = data[idx]
    if statistic == "mean":
        return resampled.mean(axis=1)
    if statistic == "variance":
        return resampled.var(axis=1)  # 1/tau divisor, same as the reports
    if statistic == "bias_sq":
        return (resampled.mean(axis=1) - target) ** 2
    return ((resampled - target) ** 2).mean(axis=1)


def _percentile(sorted_vals: np.ndarray, q: float) -> float:
    """Linear-interpolation quantile of an ascending array."""
    pos = q * (sorted_vals.size - 1)
    lo = int(pos)
    hi = min(lo + 1, sorted_vals.size - 1)
    frac = pos - lo
    return float(sorted_vals[lo] * (1.0 - frac) + sorted_vals[hi] * frac)


def bootstrap_ci(values, statistic: str, resamples: int, seed: int,
                 level: float = 0.95, target: float | None = None,
                 ) -> tuple[float, float]:
    """Percentile bootstrap interval for a statistic of the value vector.

    ``statistic`` is one of ``mean``, ``variance`` (1/tau divisor),
    ``bias_sq`` or ``mse``; the last two measure against ``target``.
    """
    if not (0.0 < level < 1.0):
        raise ConfigError(f"level must be in (0, 1), got {level!r}")
    stats = np.sort(_bootstrap_stats(values, statistic, resamples, seed, target))
    alpha = 1.0 - level
    return _percentile(stats, 0.5 * alpha), _percentile(stats, 1.0 - 0.5 * alpha)


def bootstrap_se(values, statistic: str, resamples: int, seed: int,
                 target: float | None = None) -> float:
    """Standard deviation of the bootstrap distribution of a statistic."""
    stats = _bootstrap_stats(values, statistic, resamples, seed, target)
    return float(stats.std())


# --------------------------------------------------------------------------
# denominator sweep
# --------------------------------------------------------------------------

def mse_sweep(n: int, sigma2: float, a_grid, tau: int, seed: int,
              bootstrap: BootstrapConfig = BootstrapConfig()) -> list[SweepRow]:
    """Empirical bias^2/variance/MSE over a grid of denominators.

    Draws tau normal samples once and reuses the sum of squared deviations
    across the whole grid (each row is the same statistic scaled by 1/a).
    Every row carries percentile bootstrap intervals plus the closed-form
    moments for side-by-side comparison, and rows at a = n-1, n, n+1 are
    flagged.
    """
    a_grid = [float(a) for a in a_grid]
    if not a_grid:
        raise ConfigError("denominator grid is empty")
    if any(a <= 0.0 for a in a_grid):
        raise ConfigError("denominator grid must be strictly positive")
    if tau < 100:
        raise ConfigError(f"need tau >= 100 for a sweep, got {tau}")
    if n < 2:
        raise ConfigError(f"sample size must be >= 2, got {n}")
    dist = DistributionSpec.normal(0.0, sigma2)
    ss = []
    for r in range(tau):
        rng = RngState(child_seed(seed, r))
        xs = sample(dist, n, rng)
        ss.append(generalized_variance(xs, 1.0))  # the raw sum of squared deviations
    rows = []
    for i, a in enumerate(a_grid):
        values = [s / a for s in ss]
        base = _aggregate(values, sigma2)
        row_seed = child_seed(seed, tau + i)
        ci: dict[str, tuple[float, float]] = {}
        se: dict[str, float] = {}
        for metric in ("bias_sq", "variance", "mse"):
            stats = np.sort(_bootstrap_stats(values, metric, bootstrap.resamples,
                                             row_seed, sigma2))
            alpha = 1.0 - bootstrap.level
            ci[metric] = (_percentile(stats, 0.5 * alpha),
                          _percentile(stats, 1.0 - 0.5 * alpha))
            se[metric] = float(stats.std())
        metrics = MetricSet(point_mean=base.point_mean, bias=base.bias,
                            bias_sq=base.bias_sq, variance=base.variance,
                            mse=base.mse, ci=ci, se=se)
        flagged = any(abs(a - ref) < 1e-9 for ref in (n - 1, n, n + 1))
        rows.append(SweepRow(a=a, flagged=flagged, metrics=metrics,
                             theory=theoretical_mse(n, a, sigma2)))
    return rows


# --------------------------------------------------------------------------
# naive vs optimized equivalence
# --------------------------------------------------------------------------

def equivalence_study(dist: DistributionSpec, n_list, tau: int, seed: int,
                      rtol: float = 1e-9, atol: float = 1e-9) -> list[EquivalenceRow]:
    """Replicate-by-replicate agreement of the two pairwise forms.

    A sample size passes when every replicate satisfies
    ``|naive - optimized| <= atol + rtol * |naive|``.
    """
    if rtol <= 0.0 or atol <= 0.0:
        raise ConfigError("rtol and atol must be positive")
    if tau < 1:
        raise ConfigError(f"need tau >= 1, got {tau}")
    rows = []
    for idx, n in enumerate(n_list):
        seed_n = child_seed(seed, idx)
        naive_values = []
        sum_opt = 0.0
        max_diff = 0.0
        passed = True
        for r in range(tau):
            rng = RngState(child_seed(seed_n, r))
            xs = sample(dist, n, rng)
            naive = bariance_naive(xs)
            opt = bariance_optimized(xs)
            diff = abs(naive - opt)
            naive_values.append(naive)
            sum_opt += opt
            if diff > max_diff:
                max_diff = diff
            if diff > atol + rtol * abs(naive):
                passed = False
        rows.append(EquivalenceRow(
            n=n,
            mean_naive=sum(naive_values) / tau,
            mean_optimized=sum_opt / tau,
            max_abs_diff=max_diff,
            passed=passed,
            naive_values=naive_values,
        ))
    return rows
