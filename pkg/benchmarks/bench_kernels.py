"""Benchmark the affine log-sum-exp kernel: compiled vs pure-numpy backend.

Times the correlated-survival model's hot path on a production-shaped
workload: one (survival-odds x dispersion) grid flattened to base/slope
vectors, reduced against every unknown-count value of a full posterior
sweep.  Run as

    python benchmarks/bench_kernels.py [--p-points 400] [--nu-points 241]
                                       [--repeats 5]
"""

import argparse
import os
import statistics
import time

import numpy as np

from dualsys import NuisanceGrid, bundled_data_path, load_capture_table, summarize
from dualsys import _kernels
from dualsys.models import _combinomial_grid_terms


def _workload(p_points, nu_points):
    table = load_capture_table(bundled_data_path())
    stats = summarize(table)
    nu_min = -5.0 if nu_points > 1 else 1.0
    grid = NuisanceGrid(p_points=p_points, nu_min=nu_min, nu_points=nu_points)
    base, slope = _combinomial_grid_terms(stats, stats.m, grid)
    counts = np.arange(0, 5850 - stats.observed_total + 1, dtype=np.float64)
    return base, slope, counts


def _time_backend(name, base, slope, counts, repeats):
    os.environ["DUALSYS_BACKEND"] = name
    _kernels._reset_backend_cache()
    result = _kernels.logsumexp_affine(base, slope, counts)  # warm-up / JIT
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = _kernels.logsumexp_affine(base, slope, counts)
        samples.append(time.perf_counter() - t0)
        result = out
    return result, samples


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--p-points", type=int, default=400)
    parser.add_argument("--nu-points", type=int, default=241)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    base, slope, counts = _workload(args.p_points, args.nu_points)
    cells = base.size * counts.size
    print(
        f"workload: {base.size} grid cells x {counts.size} counts "
        f"({cells / 1e6:.1f}M cell evaluations per call)"
    )

    backends = ["numpy"]
    if _kernels.numba_available():
        backends.append("numba")
    else:
        print("numba not installed; timing the numpy backend only")

    results = {}
    for name in backends:
        out, samples = _time_backend(name, base, slope, counts, args.repeats)
        results[name] = out
        best = min(samples)
        med = statistics.median(samples)
        print(
            f"{name:>6}: best {best * 1e3:8.1f} ms   median {med * 1e3:8.1f} ms"
            f"   ({cells / best / 1e6:7.1f}M cells/s)"
        )

    if len(results) == 2:
        delta = np.abs(results["numba"] - results["numpy"]).max()
        print(f"max |numba - numpy| over all counts: {delta:.3e}")

    os.environ.pop("DUALSYS_BACKEND", None)
    _kernels._reset_backend_cache()


if __name__ == "__main__":
    main()
