"""Integrated log-likelihood evaluators and the demographic range."""

import math

import numpy as np
import pytest

from dualsys import (
    DEFAULT_DEMOGRAPHICS,
    DemographicInputs,
    GridError,
    NuisanceGrid,
    demographic_range,
    loglik_binomial,
    loglik_binomial_batch,
    loglik_combinomial,
    loglik_combinomial_batch,
    loglik_simple,
    loglik_simple_batch,
    reduce,
    summarize,
)
from dualsys.lognum import log_factorial


class TestNuisanceGrid:
    def test_defaults(self):
        grid = NuisanceGrid()
        assert grid.p_points == 400
        assert grid.nu_min == 1.0
        assert grid.nu_points == 1

    def test_p_grid_midpoints(self):
        grid = NuisanceGrid(p_points=4, nu_min=1.0, nu_points=1)
        np.testing.assert_allclose(
            grid.p_grid(), [0.125, 0.375, 0.625, 0.875], rtol=1e-15
        )

    def test_nu_grid_inclusive_linspace(self):
        grid = NuisanceGrid(p_points=8, nu_min=-2.0, nu_points=4)
        np.testing.assert_allclose(grid.nu_grid(), [-2.0, -1.0, 0.0, 1.0])

    def test_single_nu_point_pins_unit_dispersion(self):
        np.testing.assert_allclose(NuisanceGrid().nu_grid(), [1.0])
        with pytest.raises(GridError, match="single-point dispersion"):
            NuisanceGrid(p_points=8, nu_min=0.5, nu_points=1)

    def test_degenerate_p_grid_rejected(self):
        with pytest.raises(GridError, match="p_points"):
            NuisanceGrid(p_points=1, nu_min=1.0, nu_points=1)

    def test_invalid_nu_bounds(self):
        with pytest.raises(GridError, match="nu_min"):
            NuisanceGrid(p_points=8, nu_min=1.5, nu_points=2)
        with pytest.raises(GridError, match="nu_points"):
            NuisanceGrid(p_points=8, nu_min=-1.0, nu_points=0)

    def test_doubled(self):
        grid = NuisanceGrid(p_points=64, nu_min=-2.0, nu_points=33)
        dbl = grid.doubled()
        assert dbl.p_points == 128
        assert dbl.nu_points == 66
        assert dbl.nu_min == -2.0


class TestSimpleModel:
    def test_matches_direct_formula(self, bundled_reduced):
        """Exact reduced form recomputed with big-integer factorials."""
        r = bundled_reduced
        t = r.n01 + r.n10 + r.n11
        for n in (0, 1, 17, 400):
            want = (
                math.lgamma(n + r.n01 + 1)
                + math.lgamma(n + r.n10 + 1)
                - math.lgamma(n + 1)
                - math.log(n + t + 1)
                - math.lgamma(n + t + 2)
            )
            np.testing.assert_allclose(
                loglik_simple(n, r), want, rtol=1e-12
            )

    def test_batch_matches_scalar(self, bundled_reduced):
        ns = np.arange(0, 300, 7)
        got = loglik_simple_batch(ns, bundled_reduced)
        want = [loglik_simple(int(n), bundled_reduced) for n in ns]
        np.testing.assert_allclose(got, want, rtol=1e-14)

    def test_unimodal_over_counts(self, bundled_reduced):
        ns = np.arange(0, 25_000)
        vals = loglik_simple_batch(ns, bundled_reduced)
        diffs = np.diff(vals)
        sign_changes = np.count_nonzero(np.diff(np.sign(diffs)) != 0)
        assert sign_changes == 1

    def test_rejects_negative_count(self, bundled_reduced):
        with pytest.raises(ValueError):
            loglik_simple(-1, bundled_reduced)


class TestBinomialModel:
    def test_matches_direct_formula(self, bundled_stats):
        """lfact(mN - L) + lfact(n + K) - lfact(n) - lfact(mN + 1) - ln(N+1)
        with N = n + observed, K = unmentioned-known, L = letters."""
        s = bundled_stats
        for n in (0, 3, 250, 4000):
            total = n + s.observed_total
            want = (
                log_factorial(s.m * total - s.letters_total)
                + log_factorial(n + s.no_mention_known)
                - log_factorial(n)
                - log_factorial(s.m * total + 1)
                - math.log(total + 1)
            )
            np.testing.assert_allclose(loglik_binomial(n, s), want, rtol=1e-12)

    def test_batch_matches_scalar(self, bundled_stats):
        ns = np.arange(0, 2000, 31)
        got = loglik_binomial_batch(ns, bundled_stats)
        want = [loglik_binomial(int(n), bundled_stats) for n in ns]
        np.testing.assert_allclose(got, want, rtol=1e-14)

    def test_archive_size_override(self, bundled_stats):
        assert loglik_binomial(10, bundled_stats, m=6) != loglik_binomial(
            10, bundled_stats
        )
        np.testing.assert_allclose(
            loglik_binomial(10, bundled_stats, m=5),
            loglik_binomial(10, bundled_stats),
            rtol=1e-15,
        )


class TestCombinomialModel:
    def test_unit_dispersion_matches_binomial_shape(self, bundled_stats):
        """With nu pinned at 1 the integrated likelihoods agree in every
        log-ratio (they differ only by an n-independent constant).  The
        default survival-odds grid resolves the integrand wherever the
        posterior carries mass; compare there."""
        grid = NuisanceGrid(p_points=400, nu_min=1.0, nu_points=1)
        ns = np.array([0, 10, 100, 500, 1000])
        com = loglik_combinomial_batch(ns, bundled_stats, grid=grid)
        bino = loglik_binomial_batch(ns, bundled_stats)
        np.testing.assert_allclose(
            com - com[0], bino - bino[0], atol=1e-5
        )

    def test_batch_matches_scalar(self, bundled_stats):
        grid = NuisanceGrid(p_points=32, nu_min=-1.0, nu_points=9)
        ns = np.arange(0, 400, 50)
        got = loglik_combinomial_batch(ns, bundled_stats, grid=grid)
        want = [
            loglik_combinomial(int(n), bundled_stats, grid=grid) for n in ns
        ]
        np.testing.assert_allclose(got, want, rtol=1e-13)

    def test_grid_refinement_converges(self, bundled_stats):
        """Log-ratios stabilize as the grid doubles."""
        ns = np.array([0, 200, 2000])
        grid = NuisanceGrid(p_points=100, nu_min=-1.0, nu_points=25)
        coarse = loglik_combinomial_batch(ns, bundled_stats, grid=grid)
        fine = loglik_combinomial_batch(
            ns, bundled_stats, grid=grid.doubled()
        )
        finest = loglik_combinomial_batch(
            ns, bundled_stats, grid=grid.doubled().doubled()
        )
        err_coarse = np.abs((coarse - coarse[0]) - (finest - finest[0])).max()
        err_fine = np.abs((fine - fine[0]) - (finest - finest[0])).max()
        assert err_fine < err_coarse

    def test_wide_dispersion_window_shifts_weight_up(self, bundled_stats):
        """Admitting nu < 1 moves posterior odds toward larger totals: the
        log-ratio ll(2000) - ll(500) grows as the window widens."""
        ns = np.array([500, 2000])
        ratios = []
        for nu_min, nu_points in ((1.0, 1), (0.0, 41), (-2.0, 121)):
            grid = NuisanceGrid(p_points=200, nu_min=nu_min, nu_points=nu_points)
            v = loglik_combinomial_batch(ns, bundled_stats, grid=grid)
            ratios.append(v[1] - v[0])
        assert ratios[0] < ratios[1] < ratios[2]


class TestDemographics:
    def test_default_inputs_frozen_range(self):
        rng = demographic_range(DEFAULT_DEMOGRAPHICS)
        np.testing.assert_allclose(rng.raw_low, 3597.6, rtol=1e-9)
        np.testing.assert_allclose(rng.raw_high, 5846.1, rtol=1e-9)
        assert (rng.low, rng.high) == (3600, 5850)

    def test_person_years(self):
        assert DEFAULT_DEMOGRAPHICS.person_years == 44_970_000

    def test_scaling(self):
        """Doubling every population doubles the raw range."""
        doubled = DemographicInputs(
            segments=tuple(
                (2 * pop, years) for pop, years in DEFAULT_DEMOGRAPHICS.segments
            ),
            rate_low=DEFAULT_DEMOGRAPHICS.rate_low,
            rate_high=DEFAULT_DEMOGRAPHICS.rate_high,
        )
        base = demographic_range(DEFAULT_DEMOGRAPHICS)
        got = demographic_range(doubled)
        np.testing.assert_allclose(got.raw_low, 2 * base.raw_low, rtol=1e-12)
        np.testing.assert_allclose(got.raw_high, 2 * base.raw_high, rtol=1e-12)

    def test_rounding_to_nearest_50(self):
        inputs = DemographicInputs(
            segments=((1_000_000, 10),), rate_low=1.0, rate_high=2.0
        )
        rng = demographic_range(inputs)
        np.testing.assert_allclose(rng.raw_low, 100.0)
        assert rng.low == 100
        assert rng.high == 200

    def test_validation(self):
        with pytest.raises(ValueError):
            DemographicInputs(segments=(), rate_low=8.0, rate_high=13.0)
        with pytest.raises(ValueError):
            DemographicInputs(
                segments=((1000, -5),), rate_low=8.0, rate_high=13.0
            )
        with pytest.raises(ValueError):
            DemographicInputs(
                segments=((1000, 5),), rate_low=-1.0, rate_high=13.0
            )


class TestModelOrdering:
    def test_simple_prefers_larger_totals(self, bundled_table):
        """The letters-count models concentrate far below the 2 x 2 model:
        compare where each log-likelihood peaks."""
        red = reduce(bundled_table)
        stats = summarize(bundled_table)
        ns = np.arange(0, 20_000)
        peak_simple = int(ns[np.argmax(loglik_simple_batch(ns, red))])
        peak_binom = int(ns[np.argmax(loglik_binomial_batch(ns, stats))])
        assert peak_binom + 337 < 1500
        assert peak_simple + 337 > 4000
