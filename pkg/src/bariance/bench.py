"""Single-threaded wall-clock benchmarking of the four estimators.

Each (estimator, sample size, trial) record stores the total time of one
batch of ``sims_per_trial`` evaluations measured with the monotonic
high-resolution clock; per-call timing at small n would sit at clock
resolution.  Datasets are generated once per (n, trial) and reused across
estimators, so paired comparisons see identical inputs.  Warmup batches
run untimed, once per (estimator, n).

Every timed evaluation folds its result into a per-record checksum that
is emitted with the report; the work being measured therefore cannot be
skipped without changing the output.  The naive pairwise estimator is
timed in its ordered-pairs form so its cost matches the n*(n-1) operation
count of the quadratic definition.

The timed regions run strictly single-threaded.  Absolute times are
hardware-bound; only orderings, ratios and log-log slopes are meaningful
across machines.
"""

from __future__ import annotations

import math
import os
import platform
import statistics
import sys
import time
from dataclasses import dataclass

from .errors import ClockError, ConfigError, InsufficientRange, MismatchedRecords
from .estimators import (
    BARIANCE_NAIVE,
    BARIANCE_OPT,
    BIASED,
    CANONICAL_KINDS,
    UNBIASED,
    EstimatorKind,
    bariance_naive_ordered,
    bariance_optimized,
    biased_variance,
    unbiased_variance,
)
from .inference import t_critical, t_tail
from .randgen import DistributionSpec, RngState, child_seed, sample

_TIMED_FUNCS = {
    BIASED.label: biased_variance,
    UNBIASED.label: unbiased_variance,
    BARIANCE_NAIVE.label: bariance_naive_ordered,
    BARIANCE_OPT.label: bariance_optimized,
}


@dataclass(frozen=True)
class BenchConfig:
    dist: DistributionSpec
    n_list: tuple[int, ...]
    trials: int
    sims_per_trial: int
    seed: int
    warmup: int = 3

    def __post_init__(self):
        if self.trials < 2:
            raise ConfigError(
                f"need >= 2 trials for dispersion statistics, got {self.trials}"
            )
        if self.sims_per_trial < 1:
            raise ConfigError(f"need >= 1 evaluation per batch, got {self.sims_per_trial}")
        if self.warmup < 0:
            raise ConfigError(f"warmup count cannot be negative, got {self.warmup}")
        if any(n < 2 for n in self.n_list):
            raise ConfigError("every benchmark sample size must be >= 2")


@dataclass(frozen=True)
class BenchmarkRecord:
    """Total elapsed time of one timed batch, with its anti-elision checksum."""

    estimator: EstimatorKind
    n: int
    trial: int
    elapsed_ns: int
    checksum: float


@dataclass(frozen=True)
class DiffStats:
    """Paired-difference t statistics between two matched record sets."""

    mean_diff: float
    sd: float
    t: float
    p: float
    ci_lo: float
    ci_hi: float
    dof: int
    exact: bool = False  # sd was zero; p is exact, CI degenerate


def _require_monotonic_clock() -> None:
    try:
        info = time.get_clock_info("perf_counter")
    except (ValueError, OSError) as exc:  # pragma: no cover - platform specific
        raise ClockError("perf_counter clock unavailable") from exc
    if not info.monotonic:  # pragma: no cover - CPython guarantees monotonic
        raise ClockError("perf_counter clock is not monotonic")


def environment_capture() -> dict[str, str]:
    """Host facts recorded alongside benchmark output."""
    info = time.get_clock_info("perf_counter")
    return {
        "os": f"{platform.system()} {platform.release()}",
        "arch": platform.machine(),
        "logical_cores": str(os.cpu_count()),
        "python": platform.python_version(),
        "clock": f"perf_counter_ns (resolution {info.resolution:g}s, monotonic)",
        "implementation": sys.implementation.name,
    }


def run_benchmark(config: BenchConfig) -> list[BenchmarkRecord]:
    """Time every (estimator, n, trial) batch; returns records in a stable
    order: n ascending, estimator in canonical order, trial ascending."""
    _require_monotonic_clock()
    records: list[BenchmarkRecord] = []
    perf = time.perf_counter_ns
    for n_idx, n in enumerate(config.n_list):
        seed_n = child_seed(config.seed, n_idx)
        datasets = [
            sample(config.dist, n, RngState(child_seed(seed_n, trial)))
            for trial in range(config.trials)
        ]
        for kind in CANONICAL_KINDS:
            func = _TIMED_FUNCS[kind.label]
            sims = config.sims_per_trial
            for _ in range(config.warmup):
                acc = 0.0
                data = datasets[0]
                for _ in range(sims):
                    acc += func(data)
            for trial in range(config.trials):
                data = datasets[trial]
                checksum = 0.0
                start = perf()
                for _ in range(sims):
                    checksum += func(data)
                elapsed = perf() - start
                records.append(BenchmarkRecord(
                    estimator=kind, n=n, trial=trial,
                    elapsed_ns=elapsed, checksum=checksum,
                ))
    return records


def scaling_report(records: list[BenchmarkRecord]) -> dict[str, float]:
    """Least-squares slope of log(median batch time) against log(n).

    Requires at least three distinct sample sizes spanning an 8x range for
    each estimator present in the records.
    """
    grouped: dict[str, dict[int, list[int]]] = {}
    for rec in records:
        grouped.setdefault(rec.estimator.name(), {}).setdefault(rec.n, []).append(
            rec.elapsed_ns
        )
    slopes: dict[str, float] = {}
    for name, by_n in grouped.items():
        ns = sorted(by_n)
        if len(ns) < 3:
            raise InsufficientRange(
                f"{name}: need >= 3 distinct sample sizes, got {len(ns)}"
            )
        if ns[-1] < 8 * ns[0]:
            raise InsufficientRange(
                f"{name}: sizes {ns[0]}..{ns[-1]} span less than 8x"
            )
        xs = [math.log(n) for n in ns]
        ys = [math.log(statistics.median(by_n[n])) for n in ns]
        x_mean = sum(xs) / len(xs)
        y_mean = sum(ys) / len(ys)
        sxx = sum((x - x_mean) ** 2 for x in xs)
        sxy = sum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
        slopes[name] = sxy / sxx
    return slopes


def paired_difference_stats(a: list[BenchmarkRecord],
                            b: list[BenchmarkRecord]) -> DiffStats:
    """Paired t statistics on per-trial time differences (a minus b).

    Records are matched by (n, trial); both sets must cover exactly the
    same keys.  With zero-variance differences the p-value is exact (1 for
    zero mean, 0 otherwise) and the interval degenerates to the mean.
    """
    map_a = {(rec.n, rec.trial): rec.elapsed_ns for rec in a}
    map_b = {(rec.n, rec.trial): rec.elapsed_ns for rec in b}
    if len(map_a) != len(a) or len(map_b) != len(b):
        raise MismatchedRecords("duplicate (n, trial) keys in a record set")
    if map_a.keys() != map_b.keys():
        raise MismatchedRecords("record sets cover different (n, trial) keys")
    if len(map_a) < 2:
        raise MismatchedRecords(f"need >= 2 matched pairs, got {len(map_a)}")
    keys = sorted(map_a)
    diffs = [float(map_a[k] - map_b[k]) for k in keys]
    tau = len(diffs)
    mean = sum(diffs) / tau
    ss = sum((d - mean) ** 2 for d in diffs)
    sd = math.sqrt(ss / (tau - 1))
    dof = tau - 1
    if sd == 0.0:
        return DiffStats(
            mean_diff=mean, sd=0.0,
            t=0.0 if mean == 0.0 else math.copysign(math.inf, mean),
            p=1.0 if mean == 0.0 else 0.0,
            ci_lo=mean, ci_hi=mean, dof=dof, exact=True,
        )
    se = sd / math.sqrt(tau)
    t = mean / se
    half = t_critical(0.95, dof) * se
    return DiffStats(mean_diff=mean, sd=sd, t=t, p=t_tail(t, dof),
                     ci_lo=mean - half, ci_hi=mean + half, dof=dof)
