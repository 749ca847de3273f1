"""Command-line entry point.

Subcommands::

    estimate     point estimates for a sample given inline or as a file
    simulate     replication study with the pairwise-measure identity check
    mse-sweep    bias^2/variance/MSE over a denominator grid, bootstrap CIs
    equivalence  naive vs optimized pairwise measure, replicate by replicate
    bench        wall-clock benchmark records, scaling slopes, paired stats
    regress      fixed-effects OLS of runtime on estimator and sample size
    theory       closed-form moments or the MSE-optimal denominator

Every command accepts ``--format table|csv|json`` (default ``table``) and
``--output PATH`` (default stdout).  Relative ``--output`` paths resolve
under ``$BARIANCE_OUTPUT_DIR`` when that variable is set; no other
environment variables are consulted.  CSV output prints floats with 17
significant digits and embeds the producing configuration as ``# key=value``
comment lines, so any run can be replayed from its own output; table output
rounds to 5 decimals for reading.  Non-timing commands are bit-reproducible
for a fixed seed.

Column schemas:

* simulate: estimator, point_mean, bias, bias_sq, variance, mse
* mse-sweep: a, flagged, bias_sq (+ci bounds), variance (+ci), mse (+ci),
  theory_bias_sq, theory_variance, theory_mse
* equivalence: n, mean_naive, mean_optimized, max_abs_diff, passed
* bench: estimator, n, trial, elapsed_ns, checksum
* regress: column, coefficient, std_error

Exit codes: 0 success, 2 configuration or parse error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bench as bench_mod
from . import inference, montecarlo, theory
from .errors import (
    BarianceError,
    ClockError,
    DegenerateData,
    NumericalInstability,
    ParseError,
    RankDeficient,
)
from .estimators import (
    BARIANCE_NAIVE,
    BARIANCE_OPT,
    UNBIASED,
    bariance_naive,
    bariance_optimized,
    biased_variance,
    mean,
    parse_kind,
    unbiased_variance,
)
from .randgen import parse_distribution

DEFAULT_SEED = 42

_NUMERICAL_ERRORS = (NumericalInstability, RankDeficient, DegenerateData, ClockError)


# --------------------------------------------------------------------------
# output envelope
# --------------------------------------------------------------------------

def _fmt17(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _fmt5(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".5f")
    return str(x)


class Emitter:
    """Writes one tabular result with its config echo in the chosen format."""

    def __init__(self, args):
        self.fmt = args.format
        self.path = args.output

    def emit(self, command: str, meta: dict, columns: list[str], rows: list[list],
             extra_comments: list[str] | None = None,
             extra_json: dict | None = None) -> None:
        if self.fmt == "csv":
            text = self._render_csv(command, meta, columns, rows, extra_comments)
        elif self.fmt == "json":
            payload = {"command": command, "config": meta,
                       "columns": columns, "rows": rows}
            if extra_json:
                payload.update(extra_json)
            text = json.dumps(payload, indent=2) + "\n"
        else:
            text = self._render_table(meta, columns, rows, extra_comments)
        if self.path:
            with open(self.path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)

    @staticmethod
    def _render_csv(command, meta, columns, rows, extra_comments):
        lines = [f"# bariance {command}"]
        lines += [f"# {key}={value}" for key, value in meta.items()]
        lines += [f"# {comment}" for comment in (extra_comments or [])]
        lines.append(",".join(columns))
        lines += [",".join(_fmt17(cell) for cell in row) for row in rows]
        return "\n".join(lines) + "\n"

    @staticmethod
    def _render_table(meta, columns, rows, extra_comments):
        cells = [[_fmt5(cell) for cell in row] for row in rows]
        widths = [max(len(col), *(len(r[i]) for r in cells)) if cells else len(col)
                  for i, col in enumerate(columns)]
        lines = [f"{key} = {value}" for key, value in meta.items()]
        lines.append("  ".join(col.rjust(w) for col, w in zip(columns, widths)))
        lines += ["  ".join(cell.rjust(w) for cell, w in zip(row, widths))
                  for row in cells]
        lines += extra_comments or []
        return "\n".join(lines) + "\n"


def _dist_meta(args) -> dict:
    return {"dist": args.dist, "seed": args.seed}


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _read_values(args) -> list[float]:
    if args.values and args.input:
        raise ParseError("give values inline or with --input, not both")
    if args.input:
        values = []
        with open(args.input) as fh:
            for lineno, line in enumerate(fh, start=1):
                token = line.strip()
                if not token:
                    continue
                try:
                    values.append(float(token))
                except ValueError:
                    raise ParseError(f"line {lineno}: cannot parse {token!r}") from None
                if not _finite(values[-1]):
                    raise ParseError(f"line {lineno}: non-finite value {token!r}")
        return values
    if not args.values:
        raise ParseError("no values given; pass them inline or with --input")
    values = []
    for pos, token in enumerate(args.values, start=1):
        try:
            values.append(float(token))
        except ValueError:
            raise ParseError(f"token {pos}: cannot parse {token!r}") from None
        if not _finite(values[-1]):
            raise ParseError(f"token {pos}: non-finite value {token!r}")
    return values


def _finite(x: float) -> bool:
    return x == x and abs(x) != float("inf")


def cmd_estimate(args) -> None:
    values = _read_values(args)
    rows = [
        ["mean", mean(values)],
        ["biased", biased_variance(values)],
        ["unbiased", unbiased_variance(values)],
        ["bariance-naive", bariance_naive(values)],
        ["bariance-opt", bariance_optimized(values)],
    ]
    meta = {"n": len(values)}
    Emitter(args).emit("estimate", meta, ["estimator", "value"], rows)


def cmd_simulate(args) -> None:
    dist = parse_distribution(args.dist)
    kinds = tuple(parse_kind(tok) for tok in args.estimators.split(","))
    config = montecarlo.StudyConfig(dist=dist, n=args.n, tau=args.tau,
                                    seed=args.seed, estimators=kinds)
    report = montecarlo.run_study(config)
    rows = [
        [name, m.point_mean, m.bias, m.bias_sq, m.variance, m.mse]
        for name, m in report.metrics.items()
    ]
    meta = {"dist": args.dist, "n": args.n, "tau": args.tau, "seed": args.seed,
            "estimators": args.estimators,
            "target_variance": _fmt17(report.target_variance)}
    comments = []
    extra_json = {}
    try:
        check = montecarlo.verify_bariance_identities(report)
        comments = [
            f"var_ratio={_fmt17(check.var_ratio)}",
            f"var_ratio_deviation={_fmt17(check.var_ratio_deviation)}",
            f"mse_relative_deviation={_fmt17(check.mse_relative_deviation)}",
        ]
        extra_json = {"identity_check": {
            "var_ratio": check.var_ratio,
            "var_ratio_deviation": check.var_ratio_deviation,
            "mse_relative_deviation": check.mse_relative_deviation,
        }}
    except BarianceError:
        pass  # identity check only applies to paired runs
    Emitter(args).emit(
        "simulate", meta,
        ["estimator", "point_mean", "bias", "bias_sq", "variance", "mse"],
        rows, extra_comments=comments, extra_json=extra_json,
    )


def _parse_grid(text: str) -> list[float]:
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(tok) for tok in text.split(":"))
            if step <= 0:
                raise ValueError
            grid = []
            value = start
            k = 0
            while value <= stop + 1e-12:
                grid.append(round(value, 10))
                k += 1
                value = start + k * step
            return grid
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ParseError(
            f"cannot parse grid {text!r}; use START:STOP:STEP or a comma list"
        ) from None


def cmd_mse_sweep(args) -> None:
    grid = _parse_grid(args.grid)
    boot = montecarlo.BootstrapConfig(resamples=args.resamples, level=args.level)
    rows_out = []
    for row in montecarlo.mse_sweep(args.n, args.sigma2, grid, args.tau,
                                    args.seed, boot):
        m = row.metrics
        rows_out.append([
            row.a, row.flagged,
            m.bias_sq, m.ci["bias_sq"][0], m.ci["bias_sq"][1],
            m.variance, m.ci["variance"][0], m.ci["variance"][1],
            m.mse, m.ci["mse"][0], m.ci["mse"][1],
            row.theory.bias_sq, row.theory.variance, row.theory.mse,
        ])
    meta = {"n": args.n, "sigma2": args.sigma2, "grid": args.grid,
            "tau": args.tau, "resamples": args.resamples, "level": args.level,
            "seed": args.seed}
    Emitter(args).emit(
        "mse-sweep", meta,
        ["a", "flagged",
         "bias_sq", "bias_sq_lo", "bias_sq_hi",
         "variance", "variance_lo", "variance_hi",
         "mse", "mse_lo", "mse_hi",
         "theory_bias_sq", "theory_variance", "theory_mse"],
        rows_out,
    )


def _parse_n_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ParseError(f"cannot parse sample-size list {text!r}") from None


def cmd_equivalence(args) -> None:
    dist = parse_distribution(args.dist)
    rows = montecarlo.equivalence_study(dist, _parse_n_list(args.n_list),
                                        args.tau, args.seed,
                                        rtol=args.rtol, atol=args.atol)
    meta = {"dist": args.dist, "n_list": args.n_list, "tau": args.tau,
            "rtol": args.rtol, "atol": args.atol, "seed": args.seed}
    Emitter(args).emit(
        "equivalence", meta,
        ["n", "mean_naive", "mean_optimized", "max_abs_diff", "passed"],
        [[r.n, r.mean_naive, r.mean_optimized, r.max_abs_diff, r.passed]
         for r in rows],
    )


def cmd_bench(args) -> None:
    dist = parse_distribution(args.dist)
    config = bench_mod.BenchConfig(
        dist=dist, n_list=_parse_n_list(args.n_list), trials=args.trials,
        sims_per_trial=args.sims_per_trial, seed=args.seed, warmup=args.warmup,
    )
    records = bench_mod.run_benchmark(config)
    meta = {"dist": args.dist, "n_list": args.n_list, "trials": args.trials,
            "sims_per_trial": args.sims_per_trial, "warmup": args.warmup,
            "seed": args.seed}
    meta.update(bench_mod.environment_capture())
    comments = []
    extra_json: dict = {}
    if records:
        slopes = _safe_slopes(records)
        if slopes:
            comments += [f"slope {name}={_fmt17(s)}" for name, s in slopes.items()]
            extra_json["slopes"] = slopes
    if args.pair:
        lbl_a, lbl_b = (parse_kind(tok).name() for tok in args.pair.split(","))
        pair_rows = []
        for n in config.n_list:
            rec_a = [r for r in records if r.estimator.name() == lbl_a and r.n == n]
            rec_b = [r for r in records if r.estimator.name() == lbl_b and r.n == n]
            stats = bench_mod.paired_difference_stats(rec_a, rec_b)
            pair_rows.append({
                "n": n, "mean_diff": stats.mean_diff, "sd": stats.sd,
                "t": stats.t, "p": stats.p, "ci_lo": stats.ci_lo,
                "ci_hi": stats.ci_hi, "dof": stats.dof, "exact": stats.exact,
            })
            comments.append(
                f"pair {lbl_a}-{lbl_b} n={n} "
                + " ".join(f"{k}={_fmt17(v)}" for k, v in pair_rows[-1].items()
                           if k != "n")
            )
        extra_json["paired"] = {"a": lbl_a, "b": lbl_b, "rows": pair_rows}
        if args.kde_out:
            _write_pair_kde(args.kde_out, records, config, lbl_a, lbl_b)
            comments.append(f"kde written to {args.kde_out}")
    Emitter(args).emit(
        "bench", meta,
        ["estimator", "n", "trial", "elapsed_ns", "checksum"],
        [[r.estimator.name(), r.n, r.trial, r.elapsed_ns, r.checksum]
         for r in records],
        extra_comments=comments, extra_json=extra_json,
    )


def _safe_slopes(records):
    try:
        return bench_mod.scaling_report(records)
    except BarianceError:
        return {}


def _write_pair_kde(path, records, config, lbl_a, lbl_b) -> None:
    """Density of per-trial runtime differences, one curve per sample size."""
    lines = [f"# bariance bench kde pair={lbl_a},{lbl_b}", "n,x,density"]
    for n in config.n_list:
        by_trial_a = {r.trial: r.elapsed_ns for r in records
                      if r.estimator.name() == lbl_a and r.n == n}
        by_trial_b = {r.trial: r.elapsed_ns for r in records
                      if r.estimator.name() == lbl_b and r.n == n}
        diffs = [float(by_trial_a[t] - by_trial_b[t]) for t in sorted(by_trial_a)]
        try:
            grid = inference.kde_grid(diffs, points=256)
            dens = inference.kde(diffs, grid)
        except DegenerateData:
            continue
        lines += [f"{n},{_fmt17(float(x))},{_fmt17(float(d))}"
                  for x, d in zip(grid, dens)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _read_bench_csv(path) -> list[tuple[str, int, float]]:
    rows = []
    with open(path) as fh:
        header = None
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                for needed in ("estimator", "n", "elapsed_ns"):
                    if needed not in header:
                        raise ParseError(f"line {lineno}: missing column {needed!r}")
                continue
            cells = line.split(",")
            if len(cells) != len(header):
                raise ParseError(f"line {lineno}: expected {len(header)} cells")
            rec = dict(zip(header, cells))
            try:
                rows.append((rec["estimator"], int(rec["n"]),
                             float(rec["elapsed_ns"])))
            except ValueError:
                raise ParseError(f"line {lineno}: malformed record") from None
    if not rows:
        raise ParseError(f"no benchmark records found in {path!r}")
    return rows


def cmd_regress(args) -> None:
    rows = _read_bench_csv(args.input)
    fit = inference.ols_fit(inference.benchmark_design(rows))
    meta = {"input": args.input, "n_obs": fit.n_obs,
            "r_squared": _fmt17(fit.r_squared)}
    out_rows = [[col, float(coef), float(se)] for col, coef, se
                in zip(fit.columns, fit.coefficients, fit.standard_errors)]
    Emitter(args).emit("regress", meta,
                       ["column", "coefficient", "std_error"], out_rows)


def cmd_theory(args) -> None:
    if args.optimal:
        numeric = theory.optimal_denominator_numeric(args.n, args.sigma2)
        closed = theory.optimal_denominator_closed_form(args.n)
        rows = [["optimal_a_closed_form", closed], ["optimal_a_numeric", numeric]]
        columns = ["quantity", "value"]
    else:
        moments_ = theory.theoretical_mse(args.n, args.a, args.sigma2)
        rows = [["bias", moments_.bias], ["bias_sq", moments_.bias_sq],
                ["variance", moments_.variance], ["mse", moments_.mse]]
        columns = ["quantity", "value"]
    meta = {"n": args.n, "sigma2": args.sigma2,
            "a": "optimal" if args.optimal else args.a}
    Emitter(args).emit("theory", meta, columns, rows)


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _add_output_flags(p) -> None:
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--output", default=None, help="write to a file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bariance",
        description="Dispersion estimators, simulation studies and runtime benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="point estimates for a sample")
    p.add_argument("values", nargs="*", help="observations given inline")
    p.add_argument("--input", default=None,
                   help="file of newline-separated observations")
    _add_output_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="replication study with identity check")
    p.add_argument("--dist", default="normal:0,1",
                   help="normal:MU,SIGMA2 or gamma:K,THETA")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--tau", type=int, default=1000, help="replication count")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--estimators",
                   default="unbiased,bariance-naive",
                   help="comma list; generalized:A for a custom denominator")
    _add_output_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mse-sweep", help="denominator sweep with bootstrap CIs")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--sigma2", type=float, default=10.0)
    p.add_argument("--grid", default="3.5:8.5:0.5",
                   help="START:STOP:STEP or comma list of denominators")
    p.add_argument("--tau", type=int, default=10_000)
    p.add_argument("--resamples", type=int, default=200)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_output_flags(p)
    p.set_defaults(func=cmd_mse_sweep)

    p = sub.add_parser("equivalence", help="naive vs optimized pairwise measure")
    p.add_argument("--dist", default="gamma:1.5,4")
    p.add_argument("--n-list", default="50,100,150,200,250")
    p.add_argument("--tau", type=int, default=1000)
    p.add_argument("--rtol", type=float, default=1e-9)
    p.add_argument("--atol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_output_flags(p)
    p.set_defaults(func=cmd_equivalence)

    p = sub.add_parser("bench", help="wall-clock estimator benchmark")
    p.add_argument("--dist", default="normal:0,1")
    p.add_argument("--n-list", default="10,20,30,40,50,60,70,80,90,100")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--sims-per-trial", type=int, default=1000)
    p.add_argument("--warmup", type=int, default=3)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--pair", default=None,
                   help="two estimators for paired t stats, e.g. unbiased,bariance-opt")
    p.add_argument("--kde-out", default=None,
                   help="with --pair: write runtime-difference densities to this CSV")
    _add_output_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("regress", help="OLS of runtime on estimator and n")
    p.add_argument("--input", required=True, help="CSV produced by `bariance bench`")
    _add_output_flags(p)
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("theory", help="closed-form moments / optimal denominator")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma2", type=float, default=1.0)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--a", type=float, default=None)
    group.add_argument("--optimal", action="store_true")
    _add_output_flags(p)
    p.set_defaults(func=cmd_theory)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except BarianceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
