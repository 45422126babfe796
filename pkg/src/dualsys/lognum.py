"""Log-domain special functions and stable accumulation primitives.

Every likelihood in this package is a ratio of factorials of counts that can
reach tens of thousands, times normalization sums over grids.  All of it is
evaluated in natural-log space; this module holds the three primitives the
rest of the code is built on: ``log_factorial``, ``log_binomial`` and
``log_sum_exp``.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

__all__ = [
    "DEFAULT_CACHE_BOUND",
    "log_factorial",
    "log_binomial",
    "log_sum_exp",
]

# Factorial arguments above this are evaluated by gammaln directly instead of
# through the lookup table.
DEFAULT_CACHE_BOUND = 1_000_000

_cache: np.ndarray | None = None
_cache_bound = DEFAULT_CACHE_BOUND


def _factorial_table(bound: int) -> np.ndarray:
    """Return (building lazily) the ln k! lookup table for k = 0..bound."""
    global _cache, _cache_bound
    if _cache is None or _cache_bound < bound:
        _cache = gammaln(np.arange(bound + 1, dtype=np.float64) + 1.0)
        _cache_bound = bound
    return _cache


def set_cache_bound(bound: int) -> None:
    """Resize the ln k! lookup table (rebuilt lazily on next use)."""
    global _cache, _cache_bound
    if bound < 0:
        raise ValueError("cache bound must be non-negative")
    _cache = None
    _cache_bound = bound


def log_factorial(k):
    """Natural log of k!, for scalar or array non-negative integer k.

    Values with k <= the cache bound come from a precomputed lookup table
    (built once, immutable afterward); larger arguments fall back to
    log-gamma.  Accurate to better than 1e-12 relative for k up to 1e6.

    Parameters
    ----------
    k : int or array_like of int
        Non-negative integer argument(s).

    Returns
    -------
    float or ndarray
        ln(k!) with the same shape as the input.
    """
    arr = np.asarray(k)
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError("log_factorial requires integer-valued input")
        arr = arr.astype(np.int64)
    if arr.size and arr.min() < 0:
        raise ValueError("log_factorial requires non-negative input")
    if arr.size and arr.max() <= _cache_bound:
        table = _factorial_table(_cache_bound)
        out = table[arr]
    else:
        out = gammaln(arr.astype(np.float64) + 1.0)
    if np.isscalar(k) or np.ndim(k) == 0:
        return float(out)
    return out


def log_binomial(n: int, k: int) -> float:
    """Natural log of the binomial coefficient C(n, k).

    Computed as ln n! - ln k! - ln (n-k)!; symmetric in k and n-k by
    construction.
    """
    if k < 0 or n < 0 or k > n:
        raise ValueError(f"log_binomial requires 0 <= k <= n, got n={n}, k={k}")
    return float(log_factorial(n) - log_factorial(k) - log_factorial(n - k))


def log_sum_exp(ws) -> float:
    """ln(sum(exp(w_i))) via max-shift, overflow-free for finite inputs.

    Entries may be -inf (zero weights drop out); an all--inf input returns
    -inf.  An empty sequence is a usage error: there is no empty log-sum.
    """
    arr = np.asarray(ws, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError("log_sum_exp of an empty sequence is undefined")
    if np.isnan(arr).any():
        raise ValueError("log_sum_exp received NaN")
    m = arr.max()
    if not np.isfinite(m):
        if m == -np.inf:
            return -np.inf
        raise ValueError("log_sum_exp received +inf")
    return float(m + np.log(np.exp(arr - m).sum()))
