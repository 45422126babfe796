"""Integrated-likelihood evaluators for the unknown event count.

Three nested models of the same two-system data, each marginalized over its
nuisance probabilities under uniform priors so that only the unknown count n
(events seen by neither system) remains:

- ``loglik_simple``: the 2 x 2 presence/absence model; both capture
  probabilities integrate in closed form (a ratio of factorials).
- ``loglik_binomial``: letters survive independently with a common
  probability, so the letters-count columns follow a binomial row; again
  closed form.
- ``loglik_combinomial``: letters survival may be correlated
  (Conway-Maxwell-binomial row); the dispersion parameter nu <= 1 and the
  survival odds are marginalized by grid quadrature.

All evaluators return log-likelihoods up to n-independent additive constants;
consumers must compare ratios or normalize (the posterior layer does).

``demographic_range`` is the independent plausibility check: person-years of
exposure times a bracket of per-capita rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .capture_data import ReducedTable, SummaryStats
from .lognum import log_factorial

__all__ = [
    "GridError",
    "NuisanceGrid",
    "DemographicInputs",
    "DemographicRange",
    "loglik_simple",
    "loglik_simple_batch",
    "loglik_binomial",
    "loglik_binomial_batch",
    "loglik_combinomial",
    "loglik_combinomial_batch",
    "demographic_range",
    "DEFAULT_DEMOGRAPHICS",
]


class GridError(ValueError):
    """Usage error: a quadrature grid that cannot support the integration."""


@dataclass(frozen=True)
class NuisanceGrid:
    """Quadrature grid for the correlated-survival model's nuisance pair.

    The survival odds are integrated by a midpoint rule on the underlying
    probability scale: p_points uniform cells on (0,1), midpoints
    (i + 0.5)/p_points.  This substitution renders the odds-scale Jacobian
    exactly, so no unbounded odds domain is ever discretized.

    The dispersion axis is a uniform grid of nu_points values on
    [nu_min, 1]; 1 is always the upper endpoint (the independence boundary,
    which is also the model's hard constraint).  The default grid is the
    single point {1.0}: on this data the reference estimates correspond to
    the boundary, and a wider window is an explicit analysis choice
    (``nu_min``/``nu_points`` are plain knobs).
    """

    p_points: int = 400
    nu_min: float = 1.0
    nu_points: int = 1

    def __post_init__(self):
        if self.p_points < 2:
            raise GridError(
                f"p_points must be >= 2, got {self.p_points}"
            )
        if self.nu_points < 1:
            raise GridError(
                f"nu_points must be >= 1, got {self.nu_points}"
            )
        if self.nu_min > 1.0:
            raise GridError(
                f"nu_min must be <= 1 (dispersion is hard-capped), got {self.nu_min}"
            )
        if self.nu_points == 1 and self.nu_min != 1.0:
            raise GridError(
                "a single-point dispersion grid must sit at the boundary "
                f"value 1.0, got nu_min={self.nu_min}"
            )
        if not math.isfinite(self.nu_min):
            raise GridError("nu_min must be finite")

    def p_grid(self) -> np.ndarray:
        return (np.arange(self.p_points, dtype=np.float64) + 0.5) / self.p_points

    def nu_grid(self) -> np.ndarray:
        return np.linspace(self.nu_min, 1.0, self.nu_points)

    def doubled(self) -> "NuisanceGrid":
        """The same window at twice the resolution on both axes."""
        return NuisanceGrid(
            p_points=2 * self.p_points,
            nu_min=self.nu_min,
            nu_points=2 * self.nu_points,
        )


def loglik_simple(n: int, table: ReducedTable) -> float:
    """Log marginal likelihood of the 2 x 2 model, up to a constant.

    Closed form: with T the observed total and row/column unknowns filled in
    by n, the two capture probabilities integrate to Beta functions, leaving

        ln (n + n01)! + ln (n + n10)! - ln n! - ln(n + T + 1) - ln (n + T + 1)!
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    t = table.observed_total
    return float(
        log_factorial(n + table.n01)
        + log_factorial(n + table.n10)
        - log_factorial(n)
        - math.log(n + t + 1)
        - log_factorial(n + t + 1)
    )


def loglik_simple_batch(ns: np.ndarray, table: ReducedTable) -> np.ndarray:
    """Vectorized ``loglik_simple`` over an integer array of counts."""
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size and ns.min() < 0:
        raise ValueError("counts must be non-negative")
    t = table.observed_total
    return (
        log_factorial(ns + table.n01)
        + log_factorial(ns + table.n10)
        - log_factorial(ns)
        - np.log(ns + t + 1.0)
        - log_factorial(ns + t + 1)
    )


def loglik_binomial(n: int, stats: SummaryStats, m: int | None = None) -> float:
    """Log marginal likelihood of the independent-survival model.

    The letters-count columns contribute a common survival probability raised
    to (letters observed) and its complement to (letters missing); both that
    probability and the mention probability integrate to Beta functions:

        ln (m*N - L)! + ln (n + K)! - ln n! - ln (m*N + 1)! - ln(N + 1),

    with N = n + observed_total, L = letters_total, K = no_mention_known.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    m = stats.m if m is None else m
    npp = n + stats.observed_total
    if stats.letters_total > m * npp:
        raise ValueError("letters_total exceeds m * (total events)")
    return float(
        log_factorial(m * npp - stats.letters_total)
        + log_factorial(n + stats.no_mention_known)
        - log_factorial(n)
        - log_factorial(m * npp + 1)
        - math.log(npp + 1)
    )


def loglik_binomial_batch(
    ns: np.ndarray, stats: SummaryStats, m: int | None = None
) -> np.ndarray:
    """Vectorized ``loglik_binomial`` over an integer array of counts."""
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size and ns.min() < 0:
        raise ValueError("counts must be non-negative")
    m = stats.m if m is None else m
    npp = ns + stats.observed_total
    return (
        log_factorial(m * npp - stats.letters_total)
        + log_factorial(ns + stats.no_mention_known)
        - log_factorial(ns)
        - log_factorial(m * npp + 1)
        - np.log(npp + 1.0)
    )


def _combinomial_grid_terms(
    stats: SummaryStats, m: int, grid: NuisanceGrid
) -> tuple[np.ndarray, np.ndarray]:
    """Per-grid-cell intercept and slope of the log integrand.

    For odds theta and dispersion nu, the integrand's log is affine in n:

        base(theta, nu) + n * slope(theta, nu)

    where base collects the observed-cell terms and slope is the log of the
    per-unseen-event factor (probability of zero surviving letters).  Both
    are returned flattened over the (p, nu) grid, in row-major (p-outer)
    order, which fixes the summation order for reproducibility.
    """
    p = grid.p_grid()
    nu = grid.nu_grid()
    log_theta = np.log(p) - np.log1p(-p)
    k = np.arange(m + 1, dtype=np.float64)
    split_logfact = log_factorial(np.arange(m + 1)) + log_factorial(
        np.arange(m, -1, -1)
    )
    # ln Z on the (p, nu) grid: logsumexp over k of k*ln(theta) - nu*ln(k!(m-k)!)
    terms = (
        k[None, None, :] * log_theta[:, None, None]
        - nu[None, :, None] * split_logfact[None, None, :]
    )
    hi = terms.max(axis=2)
    log_z = hi + np.log(np.exp(terms - hi[:, :, None]).sum(axis=2))
    base = (
        stats.letters_total * log_theta[:, None]
        - stats.split_logfact_known * nu[None, :]
        - stats.observed_total * log_z
    )
    log_m_fact = float(log_factorial(m))
    slope = -(log_m_fact * nu[None, :] + log_z)
    return base.ravel(), slope.ravel()


def loglik_combinomial_batch(
    ns: np.ndarray,
    stats: SummaryStats,
    m: int | None = None,
    grid: NuisanceGrid | None = None,
) -> np.ndarray:
    """Vectorized correlated-survival log marginal likelihood.

    The mention probability integrates in closed form; the (odds, dispersion)
    pair is summed over the grid via the backend kernel.  The uniform grid
    weights are normalized (an n-independent constant, kept for tidiness).
    """
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size and ns.min() < 0:
        raise ValueError("counts must be non-negative")
    m = stats.m if m is None else m
    grid = NuisanceGrid() if grid is None else grid
    base, slope = _combinomial_grid_terms(stats, m, grid)
    quad = _kernels.logsumexp_affine(base, slope, ns.astype(np.float64))
    quad -= math.log(grid.p_points) + math.log(grid.nu_points)
    npp = ns + stats.observed_total
    return (
        quad
        + log_factorial(ns + stats.no_mention_known)
        - log_factorial(ns)
        - np.log(npp + 1.0)
    )


def loglik_combinomial(
    n: int,
    stats: SummaryStats,
    m: int | None = None,
    grid: NuisanceGrid | None = None,
) -> float:
    """Scalar wrapper over ``loglik_combinomial_batch``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return float(
        loglik_combinomial_batch(np.array([n]), stats, m=m, grid=grid)[0]
    )


@dataclass(frozen=True)
class DemographicInputs:
    """Population segments and a per-capita rate bracket.

    segments: sequence of (population, years) pairs; rates are events per
    100,000 persons per year.
    """

    segments: tuple
    rate_low: float
    rate_high: float

    def __post_init__(self):
        if not self.segments:
            raise ValueError("at least one population segment is required")
        for pop, years in self.segments:
            if pop < 0 or years < 0:
                raise ValueError("population and years must be non-negative")
        if self.rate_low < 0 or self.rate_high < 0:
            raise ValueError("rates must be non-negative")
        if self.rate_low > self.rate_high:
            raise ValueError("rate_low must not exceed rate_high")

    @property
    def person_years(self) -> float:
        return float(sum(pop * years for pop, years in self.segments))


class DemographicRange(NamedTuple):
    raw_low: float
    raw_high: float
    low: int
    high: int


def _round_to_nearest(x: float, step: int) -> int:
    return int(math.floor(x / step + 0.5)) * step


def demographic_range(inputs: DemographicInputs) -> DemographicRange:
    """Events implied by exposure times the rate bracket.

    Returns the raw endpoints (person-years x rate / 100,000) and the same
    values rounded to the nearest 50 for headline use.
    """
    py = inputs.person_years
    raw_low = py * inputs.rate_low / 100_000.0
    raw_high = py * inputs.rate_high / 100_000.0
    return DemographicRange(
        raw_low=raw_low,
        raw_high=raw_high,
        low=_round_to_nearest(raw_low, 50),
        high=_round_to_nearest(raw_high, 50),
    )


# Demographic inputs for the bundled dataset's period and region: two
# population regimes (before and after the 1349 plague) and the rural
# homicide-rate bracket per 100,000 per year.
DEFAULT_DEMOGRAPHICS = DemographicInputs(
    segments=((330_000, 50), (130_000, 219)),
    rate_low=8.0,
    rate_high=13.0,
)
