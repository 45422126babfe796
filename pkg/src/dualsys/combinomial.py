"""The Conway-Maxwell-binomial ("com-binomial") distribution.

A two-parameter exponential-family generalization of the binomial:

    P{X = j | p, nu}  propto  p^j (1-p)^(m-j) C(m,j)^nu,   j = 0..m.

nu = 1 recovers the binomial (independent trials); nu < 1 spreads mass toward
the extremes (positively associated trials); large nu concentrates mass.  All
math is done in log space through the rewriting obtained by dividing numerator
and denominator by (1-p)^m (m!)^nu:

    P{X = j}  =  exp(j ln(theta) - nu ln(j!(m-j)!)) / Z(theta, nu),
    Z(theta, nu)  =  sum_k theta^k / [k!(m-k)!]^nu,   theta = p/(1-p).

nu is unrestricted here; the model layer imposes its own nu <= 1 constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lognum import log_factorial, log_sum_exp

__all__ = ["ComBinomialParams", "log_Z", "log_pmf", "pmf_row"]


@dataclass(frozen=True)
class ComBinomialParams:
    """Parameters (m, p or theta, nu); exactly one of p/theta is stored.

    theta = p/(1-p) is the odds form used by the log-space evaluator; p must
    lie strictly inside (0,1) so theta is finite and positive.
    """

    m: int
    nu: float
    p: float | None = None
    theta: float | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        if (self.p is None) == (self.theta is None):
            raise ValueError("exactly one of p or theta must be given")
        if self.p is not None and not 0.0 < self.p < 1.0:
            raise ValueError(f"p must be strictly inside (0,1), got {self.p}")
        if self.theta is not None and not self.theta > 0.0:
            raise ValueError(f"theta must be positive, got {self.theta}")

    @property
    def theta_value(self) -> float:
        return self.theta if self.theta is not None else self.p / (1.0 - self.p)

    @property
    def p_value(self) -> float:
        return self.p if self.p is not None else self.theta / (1.0 + self.theta)


def log_Z(theta: float, nu: float, m: int) -> float:
    """ln Z(theta, nu) = ln sum_{k=0..m} exp(k ln theta - nu ln(k!(m-k)!)).

    Finite for every finite (theta > 0, nu); evaluated with the max-shift
    log-sum so neither large theta nor large |nu| overflows.
    """
    if theta <= 0.0:
        raise ValueError(f"theta must be positive, got {theta}")
    if m < 1:
        raise ValueError("m must be a positive integer")
    k = np.arange(m + 1)
    terms = k * math.log(theta) - nu * (log_factorial(k) + log_factorial(m - k))
    return log_sum_exp(terms)


def log_pmf(j: int, params: ComBinomialParams) -> float:
    """Log probability of j successes under the given parameters."""
    m = params.m
    if not 0 <= j <= m:
        raise ValueError(f"j must be in 0..{m}, got {j}")
    theta = params.theta_value
    return (
        j * math.log(theta)
        - params.nu * (float(log_factorial(j)) + float(log_factorial(m - j)))
        - log_Z(theta, params.nu, m)
    )


def pmf_row(params: ComBinomialParams) -> np.ndarray:
    """Probabilities for j = 0..m; sums to 1 within 1e-12."""
    return np.exp([log_pmf(j, params) for j in range(params.m + 1)])
