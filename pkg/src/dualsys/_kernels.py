"""Hot-loop kernels with selectable backends (JIT-compiled or pure NumPy).

The only expensive computation in the package is the correlated-survival
model's nuisance-grid sum, which factors as

    out[t] = logsumexp(base + count[t] * slope)       over the flat grid,

where ``base`` and ``slope`` depend on the data and grid but not on the
candidate count.  Two interchangeable implementations are provided:

- ``numba``: @njit(parallel=True) with a prange over candidate counts and a
  sequential two-pass (max, then sum) inner reduction, so results are
  deterministic for any thread count.  fastmath stays off for
  reproducibility.
- ``numpy``: chunked vectorized two-pass logsumexp, single-threaded.

Backend selection: env var DUALSYS_BACKEND in {auto, numba, numpy}; ``auto``
(the default) uses numba when importable and falls back to numpy.  Env var
DUALSYS_THREADS caps the numba thread count.  Both backends are deterministic
run to run; across backends results can differ in the last ulp because numpy's
pairwise summation groups additions differently.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "resolve_backend",
    "logsumexp_affine",
    "numba_available",
]

_BACKEND_ENV = "DUALSYS_BACKEND"
_THREADS_ENV = "DUALSYS_THREADS"
_VALID_BACKENDS = ("auto", "numba", "numpy")

# Resolved lazily: (name, compiled-kernel-or-None)
_resolved: tuple[str, object] | None = None


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _build_numba_kernel():
    import numba

    threads = os.environ.get(_THREADS_ENV)
    if threads:
        try:
            n = max(1, int(threads))
        except ValueError:
            raise ValueError(
                f"{_THREADS_ENV} must be an integer, got {threads!r}"
            ) from None
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))

    @numba.njit(
        "float64[:](float64[:], float64[:], float64[:])",
        parallel=True,
        cache=True,
    )
    def kernel(base, slope, counts):  # pragma: no cover - compiled
        nt = counts.shape[0]
        ng = base.shape[0]
        out = np.empty(nt, dtype=np.float64)
        for t in numba.prange(nt):
            c = counts[t]
            hi = -np.inf
            for g in range(ng):
                v = base[g] + c * slope[g]
                if v > hi:
                    hi = v
            if hi == -np.inf:
                out[t] = -np.inf
            else:
                acc = 0.0
                for g in range(ng):
                    acc += np.exp(base[g] + c * slope[g] - hi)
                out[t] = hi + np.log(acc)
        return out

    return kernel


def _numpy_kernel(base, slope, counts, chunk=64):
    nt = counts.shape[0]
    out = np.empty(nt, dtype=np.float64)
    for s in range(0, nt, chunk):
        e = min(s + chunk, nt)
        block = base[None, :] + counts[s:e, None] * slope[None, :]
        hi = block.max(axis=1)
        safe = np.where(np.isfinite(hi), hi, 0.0)
        out[s:e] = np.where(
            hi == -np.inf,
            -np.inf,
            safe + np.log(np.exp(block - safe[:, None]).sum(axis=1)),
        )
    return out


def resolve_backend() -> str:
    """Return the active backend name, resolving and caching on first call."""
    global _resolved
    if _resolved is not None:
        return _resolved[0]
    choice = os.environ.get(_BACKEND_ENV, "auto").strip().lower()
    if choice not in _VALID_BACKENDS:
        raise ValueError(
            f"{_BACKEND_ENV} must be one of {_VALID_BACKENDS}, got {choice!r}"
        )
    if choice in ("auto", "numba") and numba_available():
        _resolved = ("numba", _build_numba_kernel())
    elif choice == "numba":
        raise RuntimeError(
            f"{_BACKEND_ENV}=numba requested but numba is not importable"
        )
    else:
        _resolved = ("numpy", None)
    return _resolved[0]


def _reset_backend_cache() -> None:
    """Forget the resolved backend (test hook for env-var changes)."""
    global _resolved
    _resolved = None


def logsumexp_affine(
    base: np.ndarray, slope: np.ndarray, counts: np.ndarray
) -> np.ndarray:
    """out[t] = logsumexp(base + counts[t] * slope), one value per count.

    Parameters
    ----------
    base, slope : float64 arrays of equal length
        Flattened per-grid-cell intercepts and per-event slopes.
    counts : float64 array
        Candidate unknown-event counts.
    """
    base = np.ascontiguousarray(base, dtype=np.float64)
    slope = np.ascontiguousarray(slope, dtype=np.float64)
    counts = np.ascontiguousarray(counts, dtype=np.float64)
    if base.shape != slope.shape or base.ndim != 1:
        raise ValueError("base and slope must be 1-D arrays of equal length")
    name = resolve_backend()
    if name == "numba":
        return _resolved[1](base, slope, counts)
    return _numpy_kernel(base, slope, counts)
