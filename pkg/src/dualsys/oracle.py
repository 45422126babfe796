"""Brute-force validators for the analytic marginalizations.

Independent re-computations of each model's marginal likelihood on small
instances: dense 2-D quadrature of the *unreduced* likelihoods (full
multinomial coefficients, original probability parameterization).  They share
no algebra with the production evaluators beyond the log-domain primitives,
so agreement is evidence that the closed forms and the substituted/ factored
grid computation are right.

Everything here is test support; nothing in the production path calls it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .capture_data import CaptureTable, ReducedTable, SummaryStats
from .lognum import log_binomial, log_factorial

__all__ = [
    "QuadratureSpec",
    "integrate_simple_bruteforce",
    "integrate_binomial_bruteforce",
    "integrate_combinomial_bruteforce",
    "closed_form_simple",
    "closed_form_binomial",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """1-D rule applied per axis: node positions and log-weights on (0,1)."""

    points_per_axis: int
    rule: str = "midpoint"

    def __post_init__(self):
        if self.points_per_axis < 8:
            raise ValueError("points_per_axis must be >= 8")
        if self.rule not in ("midpoint", "trapezoid"):
            raise ValueError(f"unknown rule {self.rule!r}")

    def nodes_logweights(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.points_per_axis
        if self.rule == "midpoint":
            nodes = (np.arange(n, dtype=np.float64) + 0.5) / n
            logw = np.full(n, -np.log(n))
        else:
            nodes = np.linspace(0.0, 1.0, n + 1)
            logw = np.full(n + 1, -np.log(n))
            logw[0] += np.log(0.5)
            logw[-1] += np.log(0.5)
        return nodes, logw


def _logsumexp2d(mat: np.ndarray) -> float:
    hi = mat.max()
    if hi == -np.inf:
        return -np.inf
    return float(hi + np.log(np.exp(mat - hi).sum()))


def closed_form_simple(n: int, table: ReducedTable) -> float:
    """Log marginal likelihood of the 2 x 2 model with all constants kept.

    Multinomial coefficient times the product of the two Beta integrals:
    row1! row0! col1! col0! / [(total+1)!]^2 over the cell factorials.
    """
    total = n + table.observed_total
    row1 = table.n10 + table.n11
    row0 = n + table.n01
    col1 = table.n01 + table.n11
    col0 = n + table.n10
    log_multinom = (
        log_factorial(total)
        - log_factorial(n)
        - log_factorial(table.n01)
        - log_factorial(table.n10)
        - log_factorial(table.n11)
    )
    return float(
        log_multinom
        + log_factorial(row1)
        + log_factorial(row0)
        + log_factorial(col1)
        + log_factorial(col0)
        - 2.0 * log_factorial(total + 1)
    )


def integrate_simple_bruteforce(
    n: int, table: ReducedTable, quad: QuadratureSpec
) -> float:
    """Log of the dense 2-D quadrature of the unreduced 2 x 2 likelihood.

    Integrand over (p, q) in the unit square: the multinomial coefficient
    times p^row1 (1-p)^row0 q^col1 (1-q)^col0, with the unknown cell filled
    in by n.  Uses xlogy so zero exponents at the endpoints stay exact.
    """
    total = n + table.observed_total
    row1 = table.n10 + table.n11
    row0 = n + table.n01
    col1 = table.n01 + table.n11
    col0 = n + table.n10
    log_multinom = (
        log_factorial(total)
        - log_factorial(n)
        - log_factorial(table.n01)
        - log_factorial(table.n10)
        - log_factorial(table.n11)
    )
    x, logw = quad.nodes_logweights()
    p_part = xlogy(row1, x) + xlogy(row0, 1.0 - x) + logw
    q_part = xlogy(col1, x) + xlogy(col0, 1.0 - x) + logw
    grid = p_part[:, None] + q_part[None, :]
    return float(log_multinom + _logsumexp2d(grid))


def closed_form_binomial(n: int, stats: SummaryStats, m: int | None = None) -> float:
    """Log marginal likelihood of the independent-survival model, constants kept."""
    m = stats.m if m is None else m
    total = n + stats.observed_total
    row0 = n + stats.no_mention_known
    lt = stats.letters_total
    return float(
        log_factorial(total)
        - log_factorial(n)
        + log_factorial(lt)
        + log_factorial(m * total - lt)
        - log_factorial(m * total + 1)
        + log_factorial(stats.mentioned_total)
        + log_factorial(row0)
        - log_factorial(total + 1)
    )


def integrate_binomial_bruteforce(
    n: int, stats: SummaryStats, m: int | None = None,
    quad: QuadratureSpec = QuadratureSpec(2048),
) -> float:
    """Log of the dense 2-D quadrature of the independent-survival likelihood.

    Integrand over (survival p, mention s): (total!/n!) p^letters
    (1-p)^missing s^mentioned (1-s)^unmentioned.
    """
    m = stats.m if m is None else m
    total = n + stats.observed_total
    row0 = n + stats.no_mention_known
    lt = stats.letters_total
    log_coeff = log_factorial(total) - log_factorial(n)
    x, logw = quad.nodes_logweights()
    p_part = xlogy(lt, x) + xlogy(m * total - lt, 1.0 - x) + logw
    s_part = xlogy(stats.mentioned_total, x) + xlogy(row0, 1.0 - x) + logw
    grid = p_part[:, None] + s_part[None, :]
    return float(log_coeff + _logsumexp2d(grid))


def integrate_combinomial_bruteforce(
    n: int,
    table: CaptureTable,
    quad: QuadratureSpec,
    nu_min: float,
) -> float:
    """Correlated-survival marginal likelihood by brute force.

    Works in the original probability parameterization of the per-event
    letters distribution — r_j(p, nu) proportional to
    p^j (1-p)^(m-j) C(m,j)^nu — with the per-column observed counts
    exponentiating r_j directly and the unknown cell contributing r_0^n.
    No odds substitution, no sufficient-statistic factoring: this path is
    deliberately independent of the production algebra, including the
    unknown-column count correction.

    The mention probability is integrated analytically (a Beta integral);
    (p, nu) are summed on a points_per_axis x points_per_axis grid with the
    same node conventions as the production evaluator: p midpoints (or the
    requested rule) and nu uniform inclusive on [nu_min, 1], weights
    normalized as a uniform prior.
    """
    m = table.m
    cols_known = np.array(
        [table.counts_mention[0]]
        + [
            table.counts_no_mention[j] + table.counts_mention[j]
            for j in range(1, m + 1)
        ],
        dtype=np.float64,
    )
    mentioned = sum(table.counts_mention)
    no_mention_known = sum(table.counts_no_mention[1:])
    total = n + table.observed_total
    row0 = n + no_mention_known

    p, logw_p = quad.nodes_logweights()
    nu = np.linspace(nu_min, 1.0, quad.points_per_axis)
    logw_nu = -np.log(quad.points_per_axis)

    js = np.arange(m + 1, dtype=np.float64)
    log_coeffs = np.array([log_binomial(m, j) for j in range(m + 1)])
    # log numerator of r_j on the (p, nu, j) grid
    log_num = (
        xlogy(js[None, None, :], p[:, None, None])
        + xlogy(m - js[None, None, :], (1.0 - p)[:, None, None])
        + nu[None, :, None] * log_coeffs[None, None, :]
    )
    hi = log_num.max(axis=2)
    log_den = hi + np.log(np.exp(log_num - hi[:, :, None]).sum(axis=2))
    log_r = log_num - log_den[:, :, None]

    exponents = cols_known.copy()
    exponents[0] += n
    # zero-count columns contribute nothing even where log_r = -inf
    # (trapezoid endpoints), so mask them before multiplying
    log_r_eff = np.where(exponents[None, None, :] == 0.0, 0.0, log_r)
    integrand = (log_r_eff * exponents[None, None, :]).sum(axis=2)
    integrand += logw_p[:, None] + logw_nu

    log_s_integral = (
        log_factorial(mentioned)
        + log_factorial(row0)
        - log_factorial(total + 1)
    )
    log_coeff = log_factorial(total) - log_factorial(n)
    return float(log_coeff + log_s_integral + _logsumexp2d(integrand))
