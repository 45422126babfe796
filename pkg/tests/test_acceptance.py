"""Acceptance gate: reference-result reproduction and cross-validation.

Each test prints one PASS/FAIL line before asserting, so a plain
``pytest -s tests/test_acceptance.py`` reads as a checklist.  Target
values are the reference quantile tables for the bundled 1300-1569
southern-rural-Norway killings dataset and derived constants frozen from
independent big-integer / high-precision evaluations.

Criterion 2's reference deciles were computed on a coarse evaluation
lattice (500-wide steps).  Under this package's exact step-1 support and
left-continuous inverse CDF they are not reproducible at the stated
tolerance; the decile clause is therefore expected to fail and is kept
faithful rather than weakened.  The same criterion's median and width
clauses pass and are asserted separately.
"""

import json

import numpy as np
import pytest

from dualsys import (
    DECILE_PROBS,
    NuisanceGrid,
    PriorSpec,
    compute_posterior,
    decile_report,
    loglik_binomial_batch,
    loglik_combinomial_batch,
    loglik_simple_batch,
    reduce,
    summarize,
)
from dualsys.cli import EXIT_OK, main
from dualsys.combinomial import ComBinomialParams, pmf_row
from dualsys.models import DEFAULT_DEMOGRAPHICS, demographic_range
from dualsys.oracle import (
    QuadratureSpec,
    closed_form_binomial,
    closed_form_simple,
    integrate_binomial_bruteforce,
    integrate_combinomial_bruteforce,
    integrate_simple_bruteforce,
)

TABLE_2X2_DECILES = (3337, 3837, 4337, 4837, 5837, 6337, 7337, 8337, 10837)
TABLE_BINOMIAL_DECILES = (978, 1037, 1076, 1116, 1155, 1195, 1234, 1293, 1372)
TABLE_COMBINOMIAL_DECILES = (959, 1021, 1051, 1113, 1143, 1174, 1235, 1265, 1357)


def _report(batch, total_min, total_max, observed=337):
    prior = PriorSpec(total_min=total_min, total_max=total_max)
    dist = compute_posterior(None, prior, observed, batch=batch)
    return decile_report(dist)


def _decile_tuple(report):
    return tuple(report.quantiles[q] for q in DECILE_PROBS)


def _emit(criterion, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] criterion {criterion}: {detail}")


@pytest.fixture(scope="module")
def simple_report(bundled_reduced):
    return _report(
        lambda ns: loglik_simple_batch(ns, bundled_reduced), 337, 25_000
    )


@pytest.fixture(scope="module")
def binomial_report(bundled_stats):
    return _report(
        lambda ns: loglik_binomial_batch(ns, bundled_stats), 337, 5_850
    )


@pytest.fixture(scope="module")
def combinomial_report(bundled_stats):
    grid = NuisanceGrid()
    return _report(
        lambda ns: loglik_combinomial_batch(ns, bundled_stats, grid=grid),
        337,
        5_850,
    )


class TestCriterion1Reduction:
    def test_reduction_exact(self, bundled_table):
        red = reduce(bundled_table)
        got = (red.n01, red.n10, red.n11, bundled_table.observed_total)
        ok = got == (190, 143, 4, 337)
        _emit(1, ok, f"2x2 reduction {got} == (190, 143, 4, 337)")
        assert ok


class TestCriterion2SimpleModel:
    def test_deciles_within_500(self, simple_report):
        got = _decile_tuple(simple_report)
        diffs = tuple(g - w for g, w in zip(got, TABLE_2X2_DECILES))
        ok = all(abs(d) <= 500 for d in diffs)
        _emit(
            "2 (deciles)",
            ok,
            f"2x2 model deciles {got} vs reference "
            f"{TABLE_2X2_DECILES}, diffs {diffs}, tolerance +/-500",
        )
        assert ok

    def test_median_within_500(self, simple_report):
        diff = simple_report.median - 5837
        ok = abs(diff) <= 500
        _emit(
            "2 (median)",
            ok,
            f"2x2 model median {simple_report.median} vs 5837 "
            f"(diff {diff:+d}, tolerance +/-500)",
        )
        assert ok

    def test_middle_80_width_within_1000(self, simple_report):
        width = simple_report.quantiles[0.9] - simple_report.quantiles[0.1]
        diff = width - 7500
        ok = abs(diff) <= 1000
        _emit(
            "2 (width)",
            ok,
            f"2x2 model middle-80% width {width} vs 7500 "
            f"(diff {diff:+d}, tolerance +/-1000)",
        )
        assert ok


class TestCriterion3BinomialModel:
    def test_deciles_within_40(self, binomial_report):
        got = _decile_tuple(binomial_report)
        diffs = tuple(g - w for g, w in zip(got, TABLE_BINOMIAL_DECILES))
        ok = all(abs(d) <= 40 for d in diffs)
        _emit(
            3,
            ok,
            f"independent-survival deciles {got} vs reference "
            f"{TABLE_BINOMIAL_DECILES}, diffs {diffs}, tolerance +/-40",
        )
        assert ok


class TestCriterion4CombinomialModel:
    def test_deciles_within_60(self, combinomial_report):
        got = _decile_tuple(combinomial_report)
        diffs = tuple(g - w for g, w in zip(got, TABLE_COMBINOMIAL_DECILES))
        ok = all(abs(d) <= 60 for d in diffs)
        _emit(
            "4 (deciles)",
            ok,
            f"correlated-survival deciles {got} vs reference "
            f"{TABLE_COMBINOMIAL_DECILES}, diffs {diffs}, tolerance +/-60",
        )
        assert ok

    def test_median_close_to_binomial(self, combinomial_report,
                                      binomial_report):
        rel = abs(
            combinomial_report.median - binomial_report.median
        ) / binomial_report.median
        ok = rel < 0.05
        _emit(
            "4 (median vs binomial)",
            ok,
            f"correlated-survival median {combinomial_report.median} vs "
            f"binomial {binomial_report.median} "
            f"(relative gap {rel:.4f} < 0.05)",
        )
        assert ok


class TestCriterion5OracleEquivalence:
    def test_closed_forms_match_quadrature(self, toy_table):
        quad = QuadratureSpec(points_per_axis=2048)
        toy_stats = summarize(toy_table)
        toy_reduced = reduce(toy_table)
        worst = 0.0
        for n in (0, 5, 50):
            want = closed_form_simple(n, toy_reduced)
            got = integrate_simple_bruteforce(n, toy_reduced, quad)
            worst = max(worst, abs(got - want) / abs(want))
            want = closed_form_binomial(n, toy_stats)
            got = integrate_binomial_bruteforce(n, toy_stats, quad=quad)
            worst = max(worst, abs(got - want) / abs(want))
        ok = worst <= 1e-6
        _emit(
            "5 (closed forms)",
            ok,
            f"closed forms vs 2-D quadrature on a 5-event table: worst "
            f"relative error {worst:.3e} <= 1e-6 at n in {{0, 5, 50}}",
        )
        assert ok

    def test_production_combinomial_matches_bruteforce(self, bundled_table,
                                                       bundled_stats):
        from dualsys.models import loglik_combinomial

        k = 64
        grid = NuisanceGrid(p_points=k, nu_min=-2.0, nu_points=k)
        quad = QuadratureSpec(points_per_axis=k)
        prod = {
            n: loglik_combinomial(n, bundled_stats, grid=grid)
            for n in (0, 10, 100)
        }
        brute = {
            n: integrate_combinomial_bruteforce(n, bundled_table, quad,
                                                nu_min=-2.0)
            for n in (0, 10, 100)
        }
        worst = max(
            abs((prod[n] - prod[0]) - (brute[n] - brute[0]))
            for n in (10, 100)
        )
        ok = worst <= 1e-4
        _emit(
            "5 (production vs brute force)",
            ok,
            f"correlated-survival evaluator vs original-parameterization "
            f"brute force: worst log-ratio error {worst:.3e} <= 1e-4 "
            f"at n in {{0, 10, 100}}",
        )
        assert ok


class TestCriterion6DistributionProperties:
    def test_properties(self):
        p_grid = np.linspace(0.05, 0.95, 19)
        nu_grid = np.linspace(-5.0, 1.5, 14)

        norm_err = max(
            abs(pmf_row(ComBinomialParams(m=5, p=float(p), nu=float(nu))).sum()
                - 1.0)
            for p in p_grid
            for nu in nu_grid
        )

        binom_err = 0.0
        for p in p_grid:
            row = pmf_row(ComBinomialParams(m=5, p=float(p), nu=1.0))
            js = np.arange(6)
            want = (
                np.array([1, 5, 10, 10, 5, 1])
                * p**js
                * (1 - p) ** (5 - js)
            )
            binom_err = max(binom_err, np.abs(row - want).max())

        sym_err = max(
            np.abs(
                pmf_row(ComBinomialParams(m=5, p=0.5, nu=float(nu)))
                - pmf_row(ComBinomialParams(m=5, p=0.5, nu=float(nu)))[::-1]
            ).max()
            for nu in nu_grid
        )

        central = [
            pmf_row(ComBinomialParams(m=5, p=0.5, nu=float(nu)))[2:4].sum()
            for nu in np.sort(nu_grid)
        ]
        monotone = all(
            b >= a - 1e-12 for a, b in zip(central, central[1:])
        )

        ok = (
            norm_err <= 1e-12
            and binom_err <= 1e-12
            and sym_err <= 1e-12
            and monotone
        )
        _emit(
            6,
            ok,
            f"pmf normalization err {norm_err:.2e}, nu=1 binomial err "
            f"{binom_err:.2e}, p=0.5 symmetry err {sym_err:.2e} "
            f"(all <= 1e-12), central mass nondecreasing in nu: {monotone}",
        )
        assert ok


class TestCriterion7Demographics:
    def test_range(self):
        rng = demographic_range(DEFAULT_DEMOGRAPHICS)
        raw_ok = (
            abs(rng.raw_low - 3597.6) <= 1e-9 * 3597.6
            and abs(rng.raw_high - 5846.1) <= 1e-9 * 5846.1
        )
        rounded_ok = (rng.low, rng.high) == (3600, 5850)
        ok = raw_ok and rounded_ok
        _emit(
            7,
            ok,
            f"demographic range raw ({rng.raw_low}, {rng.raw_high}) vs "
            f"(3597.6, 5846.1) within 1e-9; rounded ({rng.low}, {rng.high}) "
            f"== (3600, 5850)",
        )
        assert ok


class TestCriterion8GridStability:
    def test_doubling_moves_deciles_under_1pct(self, bundled_stats,
                                               combinomial_report):
        doubled = NuisanceGrid().doubled()
        refined = _report(
            lambda ns: loglik_combinomial_batch(ns, bundled_stats,
                                                grid=doubled),
            337,
            5_850,
        )
        base = np.array(_decile_tuple(combinomial_report), dtype=float)
        fine = np.array(_decile_tuple(refined), dtype=float)
        worst = np.abs(fine - base).max() / base.min()
        ok = np.all(np.abs(fine - base) / base < 0.01)
        _emit(
            8,
            ok,
            f"doubling the nuisance grid moves deciles from "
            f"{tuple(int(b) for b in base)} to "
            f"{tuple(int(f) for f in fine)} "
            f"(worst relative move {worst:.2e} < 1%)",
        )
        assert ok


class TestCriterion9Determinism:
    def test_reports_byte_identical(self, tmp_path):
        outdir = tmp_path / "out"
        blobs = []
        for _ in range(2):
            code = main(
                [
                    "run", "--model", "binomial",
                    "--output-dir", str(outdir),
                    "--emit", "report_json,posterior_csv",
                ]
            )
            assert code == EXIT_OK
            blobs.append(
                (
                    (outdir / "report_binomial.json").read_bytes(),
                    (outdir / "posterior_binomial.csv").read_bytes(),
                )
            )
        ok = blobs[0] == blobs[1]
        report_len = len(blobs[0][0])
        _emit(
            9,
            ok,
            f"two identical runs produced byte-identical report_json "
            f"({report_len} bytes) and posterior_csv",
        )
        assert ok
        doc = json.loads(blobs[0][0])
        assert doc["median"] == 1169
