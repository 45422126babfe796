"""Command-line front end for the dual-systems estimators.

Verbs:

- ``run``          load data, pick a model and prior, emit posterior outputs
- ``figure3``      per-parameter pmf panels of the correlated-survival law
- ``demographics`` exposure x rate plausibility range
- ``self-check``   quick independent-quadrature validation of the evaluators

Exit codes: 0 success, 2 configuration/usage error, 3 data error,
4 numeric or output failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import oracle
from .capture_data import (
    CaptureDataError,
    bundled_data_path,
    load_capture_table,
    reduce,
    summarize,
)
from .combinomial import ComBinomialParams, pmf_row
from .models import (
    DEFAULT_DEMOGRAPHICS,
    DemographicInputs,
    GridError,
    NuisanceGrid,
    demographic_range,
    loglik_binomial_batch,
    loglik_combinomial_batch,
    loglik_simple_batch,
)
from .posterior import (
    DECILE_PROBS,
    NumericError,
    PriorSpec,
    compute_posterior,
    decile_report,
)

__all__ = ["RunConfig", "main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

MODELS = ("simple", "binomial", "combinomial")
EMIT_KINDS = ("posterior_csv", "report_json", "figure_data")

# Default prior upper bounds per model: the 2 x 2 model is reported on a wide
# display prior; the letters-count models use the demographic upper bound.
DEFAULT_TOTAL_MAX = {"simple": 25_000, "binomial": 5_850, "combinomial": 5_850}


class ConfigError(ValueError):
    """Invalid combination of command-line options."""


@dataclass(frozen=True)
class RunConfig:
    data_path: str
    model: str
    total_min: int | None
    total_max: int | None
    p_points: int
    nu_min: float
    nu_points: int
    output_dir: str
    emit: tuple

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}")
        for kind in self.emit:
            if kind not in EMIT_KINDS:
                raise ConfigError(f"unknown emit kind {kind!r}")


def _fmt12(x: float) -> str:
    return format(float(x), ".12g")


def _round12(x: float) -> float:
    return float(_fmt12(x))


def _print_decile_table(report, out=None) -> None:
    out = out or sys.stdout
    cells = [report.quantiles[q] for q in DECILE_PROBS]
    quant_row = "Quantile    " + "".join(f"{c:>8d}" for c in cells)
    prob_row = "Probability " + "".join(f"{q:>8.1f}" for q in DECILE_PROBS)
    print(quant_row, file=out)
    print(prob_row, file=out)


def _posterior_for(config: RunConfig):
    table = load_capture_table(config.data_path)
    observed = table.observed_total
    total_min = config.total_min if config.total_min is not None else observed
    total_max = (
        config.total_max
        if config.total_max is not None
        else DEFAULT_TOTAL_MAX[config.model]
    )
    try:
        prior = PriorSpec(total_min=total_min, total_max=total_max)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if config.model == "simple":
        reduced = reduce(table)
        batch = lambda ns: loglik_simple_batch(ns, reduced)  # noqa: E731
    elif config.model == "binomial":
        stats = summarize(table)
        batch = lambda ns: loglik_binomial_batch(ns, stats)  # noqa: E731
    else:
        stats = summarize(table)
        grid = NuisanceGrid(
            p_points=config.p_points,
            nu_min=config.nu_min,
            nu_points=config.nu_points,
        )
        batch = lambda ns: loglik_combinomial_batch(ns, stats, grid=grid)  # noqa: E731
    try:
        dist = compute_posterior(
            loglik=None, prior=prior, observed_total=observed, batch=batch
        )
    except ValueError as exc:
        if isinstance(exc, GridError):
            raise
        raise ConfigError(str(exc)) from exc
    return dist


def _write_posterior_csv(dist, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("total,log_weight,prob\n")
        for t, lw, pr in zip(dist.totals, dist.log_weights, dist.probs):
            fh.write(f"{int(t)},{_fmt12(lw)},{_fmt12(pr)}\n")


def _write_figure_csv(dist, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("total,prob\n")
        for t, pr in zip(dist.totals, dist.probs):
            fh.write(f"{int(t)},{_fmt12(pr)}\n")


def _write_report_json(config: RunConfig, prior, report, path: Path) -> None:
    doc = {
        "model": config.model,
        "prior": {"total_min": prior.total_min, "total_max": prior.total_max},
        "deciles": {f"{q:.1f}": report.quantiles[q] for q in DECILE_PROBS},
        "median": report.median,
        "mean": _round12(report.mean),
        "config": {
            "data_path": config.data_path,
            "model": config.model,
            "total_min": prior.total_min,
            "total_max": prior.total_max,
            "p_points": config.p_points,
            "nu_min": config.nu_min,
            "nu_points": config.nu_points,
            "output_dir": config.output_dir,
            "emit": list(config.emit),
        },
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def cmd_run(args) -> int:
    emit = []
    for item in args.emit:
        emit.extend(k for k in item.split(",") if k)
    config = RunConfig(
        data_path=args.data,
        model=args.model,
        total_min=args.total_min,
        total_max=args.total_max,
        p_points=args.p_points,
        nu_min=args.nu_min,
        nu_points=args.nu_points,
        output_dir=args.output_dir,
        emit=tuple(emit),
    )
    if config.model != "combinomial":
        defaults = NuisanceGrid()
        supplied = (
            config.p_points != defaults.p_points
            or config.nu_min != defaults.nu_min
            or config.nu_points != defaults.nu_points
        )
        if supplied:
            raise ConfigError(
                "--p-points/--nu-min/--nu-points apply only to the "
                "combinomial model"
            )
    t0 = time.perf_counter()
    dist = _posterior_for(config)
    report = decile_report(dist)
    runtime_ms = (time.perf_counter() - t0) * 1000.0

    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    prior = PriorSpec(
        total_min=int(dist.totals[0]), total_max=int(dist.totals[-1])
    )
    if "posterior_csv" in config.emit:
        _write_posterior_csv(dist, outdir / f"posterior_{config.model}.csv")
    if "report_json" in config.emit:
        _write_report_json(config, prior, report, outdir / f"report_{config.model}.json")
    if "figure_data" in config.emit:
        _write_figure_csv(dist, outdir / f"figure_{config.model}.csv")

    _print_decile_table(report)
    print(f"runtime_ms={runtime_ms:.1f}", file=sys.stderr)
    return EXIT_OK


def cmd_figure3(args) -> int:
    try:
        p_values = [float(v) for v in args.p_values.split(",") if v]
        nu_values = [float(v) for v in args.nu_values.split(",") if v]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not p_values or not nu_values:
        raise ConfigError("p-values and nu-values must be non-empty")
    if args.m < 1:
        raise ConfigError(f"m must be a positive integer, got {args.m}")
    for p in p_values:
        if not 0.0 < p < 1.0:
            raise ConfigError(
                f"p-values must lie strictly inside (0,1), got {p}"
            )
    rows = []
    for p in p_values:
        for nu in nu_values:
            probs = pmf_row(ComBinomialParams(m=args.m, p=p, nu=nu))
            rows.extend(
                (p, nu, j, probs[j]) for j in range(args.m + 1)
            )
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("panel_p,panel_nu,j,probability\n")
        for p, nu, j, prob in rows:
            fh.write(f"{_fmt12(p)},{_fmt12(nu)},{j},{_fmt12(prob)}\n")
    print(f"wrote {len(p_values) * len(nu_values)} panels to {args.out}")
    return EXIT_OK


def _parse_segments(text: str) -> tuple:
    segments = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            pop_s, years_s = part.split(":")
            segments.append((int(pop_s), int(years_s)))
        except ValueError:
            raise ConfigError(
                f"segment {part!r} must look like POPULATION:YEARS"
            ) from None
    if not segments:
        raise ConfigError("at least one population segment is required")
    return tuple(segments)


def cmd_demographics(args) -> int:
    if args.segments is None:
        inputs = DEFAULT_DEMOGRAPHICS
        if args.rate_low is not None or args.rate_high is not None:
            inputs = DemographicInputs(
                segments=DEFAULT_DEMOGRAPHICS.segments,
                rate_low=args.rate_low if args.rate_low is not None else inputs.rate_low,
                rate_high=args.rate_high if args.rate_high is not None else inputs.rate_high,
            )
    else:
        inputs = DemographicInputs(
            segments=_parse_segments(args.segments),
            rate_low=args.rate_low if args.rate_low is not None else 8.0,
            rate_high=args.rate_high if args.rate_high is not None else 13.0,
        )
    rng = demographic_range(inputs)
    doc = {
        "raw": {"low": _round12(rng.raw_low), "high": _round12(rng.raw_high)},
        "rounded": {"low": rng.low, "high": rng.high},
        "segments": [
            {
                "population": pop,
                "years": years,
                "person_years": pop * years,
            }
            for pop, years in inputs.segments
        ],
        "rate_per_100k": {"low": inputs.rate_low, "high": inputs.rate_high},
    }
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_self_check(args) -> int:
    """Cross-validate evaluators against the independent quadrature oracles."""
    from .capture_data import CaptureTable, ReducedTable
    from .models import (
        loglik_binomial,
        loglik_combinomial,
        loglik_simple,
    )

    failures = 0

    def check(name: str, err: float, tol: float) -> None:
        nonlocal failures
        ok = err <= tol
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}: max err {err:.3e} (tol {tol:.0e})")
        if not ok:
            failures += 1

    quad = oracle.QuadratureSpec(points_per_axis=512, rule="midpoint")
    toy = ReducedTable(n01=2, n10=2, n11=1)
    err = max(
        abs(
            oracle.integrate_simple_bruteforce(n, toy, quad)
            - oracle.closed_form_simple(n, toy)
        )
        for n in (0, 5, 50)
    )
    check("2x2 closed form vs quadrature", err, 1e-5)

    toy_table = CaptureTable(
        m=3,
        counts_no_mention=(None, 2, 1, 0),
        counts_mention=(2, 1, 0, 0),
    )
    toy_stats = summarize(toy_table)
    err = max(
        abs(
            oracle.integrate_binomial_bruteforce(n, toy_stats, quad=quad)
            - oracle.closed_form_binomial(n, toy_stats)
        )
        for n in (0, 5, 50)
    )
    check("independent-survival closed form vs quadrature", err, 1e-5)

    data = load_capture_table(args.data)
    stats = summarize(data)
    k = 64
    grid = NuisanceGrid(p_points=k, nu_min=-2.0, nu_points=k)
    bquad = oracle.QuadratureSpec(points_per_axis=k, rule="midpoint")
    pairs = [(0, 1), (10, 11), (100, 101)]
    err = 0.0
    for n_lo, n_hi in pairs:
        prod = loglik_combinomial(n_hi, stats, grid=grid) - loglik_combinomial(
            n_lo, stats, grid=grid
        )
        brute = oracle.integrate_combinomial_bruteforce(
            n_hi, data, bquad, nu_min=-2.0
        ) - oracle.integrate_combinomial_bruteforce(n_lo, data, bquad, nu_min=-2.0)
        err = max(err, abs(prod - brute))
    check("correlated-survival grid vs original-form quadrature", err, 1e-4)

    simple_pairs = [
        loglik_simple(n + 1, reduce(data)) - loglik_simple(n, reduce(data))
        for n in (0, 10)
    ]
    oracle_pairs = [
        oracle.closed_form_simple(n + 1, reduce(data))
        - oracle.closed_form_simple(n, reduce(data))
        for n in (0, 10)
    ]
    err = max(abs(a - b) for a, b in zip(simple_pairs, oracle_pairs))
    check("2x2 reduced vs full-form log-ratios", err, 1e-9)

    bin_pairs = [
        loglik_binomial(n + 1, stats) - loglik_binomial(n, stats)
        for n in (0, 10)
    ]
    oracle_bin = [
        oracle.closed_form_binomial(n + 1, stats)
        - oracle.closed_form_binomial(n, stats)
        for n in (0, 10)
    ]
    err = max(abs(a - b) for a, b in zip(bin_pairs, oracle_bin))
    check("independent-survival reduced vs full-form log-ratios", err, 1e-9)

    return EXIT_OK if failures == 0 else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualsys",
        description="Dual-systems estimation of an unknown event count "
        "from two overlapping record systems.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    run = sub.add_parser("run", help="fit a model and emit posterior reports")
    run.add_argument("--data", default=bundled_data_path(),
                     help="capture-table CSV (default: bundled dataset)")
    run.add_argument("--model", required=True, choices=MODELS)
    run.add_argument("--total-min", type=int, default=None,
                     help="prior lower bound on the total (default: observed)")
    run.add_argument("--total-max", type=int, default=None,
                     help="prior upper bound on the total "
                     "(default: 25000 simple, 5850 otherwise)")
    run.add_argument("--p-points", type=int, default=NuisanceGrid.p_points,
                     help="survival-odds grid resolution (combinomial only)")
    run.add_argument("--nu-min", type=float, default=NuisanceGrid.nu_min,
                     help="dispersion grid lower endpoint (combinomial only)")
    run.add_argument("--nu-points", type=int, default=NuisanceGrid.nu_points,
                     help="dispersion grid size (combinomial only)")
    run.add_argument("--output-dir", default=".")
    run.add_argument("--emit", action="append",
                     default=None,
                     help="comma-separated subset of "
                     f"{{{','.join(EMIT_KINDS)}}}; repeatable")
    run.set_defaults(func=cmd_run)

    fig3 = sub.add_parser(
        "figure3", help="emit pmf panels of the correlated-survival law"
    )
    fig3.add_argument("--p-values", default="0.1,0.5,0.9")
    fig3.add_argument("--nu-values", default="-2,0,1,3")
    fig3.add_argument("--m", type=int, default=5)
    fig3.add_argument("--out", default="figure3.csv")
    fig3.set_defaults(func=cmd_figure3)

    demo = sub.add_parser(
        "demographics", help="exposure x rate plausibility range"
    )
    demo.add_argument("--segments", default=None,
                      help="POPULATION:YEARS[,POPULATION:YEARS...] "
                      "(default: bundled dataset's period)")
    demo.add_argument("--rate-low", type=float, default=None)
    demo.add_argument("--rate-high", type=float, default=None)
    demo.add_argument("--out", default=None)
    demo.set_defaults(func=cmd_demographics)

    selfcheck = sub.add_parser(
        "self-check", help="validate evaluators against quadrature oracles"
    )
    selfcheck.add_argument("--data", default=bundled_data_path())
    selfcheck.set_defaults(func=cmd_self_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "emit", None) is None and args.verb == "run":
        args.emit = ["posterior_csv,report_json"]
    try:
        return args.func(args)
    except (ConfigError, GridError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CaptureDataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericError, OSError, ArithmeticError, ValueError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
