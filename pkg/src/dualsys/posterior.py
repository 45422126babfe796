"""Normalized discrete posteriors over the total event count.

Turns a log-likelihood evaluator over the unknown count n plus a uniform
prior on the total (= n + observed) into a normalized distribution on a
contiguous step-1 grid of totals, with quantiles, mean and CDF.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .lognum import log_sum_exp

__all__ = [
    "NumericError",
    "PriorSpec",
    "PosteriorDistribution",
    "QuantileReport",
    "compute_posterior",
    "quantile",
    "decile_report",
    "DECILE_PROBS",
]

DECILE_PROBS = tuple(round(0.1 * i, 1) for i in range(1, 10))

# Absolute CDF slack used when inverting: keeps exact rational ties (for
# example a uniform distribution hitting 0.5 on the nose) from being broken
# by float-64 cumsum rounding.  Far below every tolerance used by consumers.
_CDF_TIE_EPS = 1e-12


class NumericError(ArithmeticError):
    """Raised when a posterior evaluation produces non-finite weights."""


@dataclass(frozen=True)
class PriorSpec:
    """Uniform prior on the total over [total_min, total_max], inclusive."""

    total_min: int
    total_max: int

    def __post_init__(self):
        if self.total_min < 0:
            raise ValueError(
                f"total_min must be a non-negative count, got {self.total_min}"
            )
        if self.total_min > self.total_max:
            raise ValueError(
                f"total_min={self.total_min} exceeds total_max={self.total_max}"
            )

    def totals(self) -> np.ndarray:
        return np.arange(self.total_min, self.total_max + 1, dtype=np.int64)


@dataclass(frozen=True)
class PosteriorDistribution:
    """Discrete distribution over contiguous totals.

    probs[i] = exp(log_weights[i] - logsumexp(log_weights)); sums to 1
    within 1e-12.
    """

    totals: np.ndarray
    log_weights: np.ndarray
    probs: np.ndarray
    _cdf: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if not (len(self.totals) == len(self.log_weights) == len(self.probs)):
            raise ValueError("totals, log_weights and probs must align")
        if len(self.totals) == 0:
            raise ValueError("empty support")
        diffs = np.diff(self.totals)
        if diffs.size and not np.all(diffs == 1):
            raise ValueError("totals must be contiguous with step 1")
        if np.any(self.probs < 0) or not np.isfinite(self.probs).all():
            raise NumericError("probabilities must be finite and non-negative")
        if abs(float(self.probs.sum()) - 1.0) > 1e-12:
            raise NumericError("probabilities must sum to 1 within 1e-12")
        object.__setattr__(self, "_cdf", np.cumsum(self.probs))

    @property
    def cdf(self) -> np.ndarray:
        return self._cdf

    def mean(self) -> float:
        return float(np.dot(self.totals.astype(np.float64), self.probs))


@dataclass(frozen=True)
class QuantileReport:
    """Decile table plus median and mean, mirroring the report layout."""

    quantiles: dict
    median: int
    mean: float


def compute_posterior(
    loglik: Callable[[int], float],
    prior: PriorSpec,
    observed_total: int,
    batch: Callable[[np.ndarray], np.ndarray] | None = None,
) -> PosteriorDistribution:
    """Evaluate, normalize and wrap the posterior over the prior support.

    Parameters
    ----------
    loglik : callable
        Maps the unknown count n (total - observed_total) to a log-weight.
    prior : PriorSpec
        Uniform prior on totals; requires observed_total <= total_min.
    observed_total : int
        Events seen by at least one system.
    batch : callable, optional
        Vectorized form mapping an int64 array of counts to an array of
        log-weights; used instead of looping when provided.

    Evaluator failures propagate with the offending count attached.
    """
    if observed_total > prior.total_min:
        raise ValueError(
            f"prior total_min={prior.total_min} must be >= observed "
            f"total {observed_total}"
        )
    totals = prior.totals()
    ns = totals - observed_total
    if batch is not None:
        log_weights = np.asarray(batch(ns), dtype=np.float64)
        if log_weights.shape != ns.shape:
            raise ValueError("batch evaluator returned a misshapen array")
        bad = np.nonzero(~np.isfinite(log_weights) & (log_weights != -np.inf))[0]
        if bad.size:
            raise NumericError(
                f"evaluator returned non-finite log-weight at n={int(ns[bad[0]])}"
            )
    else:
        log_weights = np.empty(ns.size, dtype=np.float64)
        for i, n in enumerate(ns):
            try:
                w = float(loglik(int(n)))
            except Exception as exc:
                raise type(exc)(f"evaluator failed at n={int(n)}: {exc}") from exc
            if np.isnan(w) or w == np.inf:
                raise NumericError(
                    f"evaluator returned non-finite log-weight at n={int(n)}"
                )
            log_weights[i] = w
    norm = log_sum_exp(log_weights)
    if not np.isfinite(norm):
        raise NumericError("posterior has zero total mass")
    probs = np.exp(log_weights - norm)
    probs /= probs.sum()
    return PosteriorDistribution(
        totals=totals, log_weights=log_weights, probs=probs
    )


def quantile(dist: PosteriorDistribution, q: float) -> int:
    """Smallest total with CDF >= q (left-continuous discrete inverse)."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must be strictly inside (0,1), got {q}")
    idx = int(np.searchsorted(dist.cdf, q - _CDF_TIE_EPS, side="left"))
    idx = min(idx, len(dist.totals) - 1)
    return int(dist.totals[idx])


def decile_report(dist: PosteriorDistribution) -> QuantileReport:
    """Quantiles at 0.1..0.9 plus median and mean."""
    qs = {q: quantile(dist, q) for q in DECILE_PROBS}
    return QuantileReport(quantiles=qs, median=qs[0.5], mean=dist.mean())
