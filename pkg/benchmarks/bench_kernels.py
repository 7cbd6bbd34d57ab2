"""Benchmark the interpolation kernels: compiled extension vs numpy fallback.

The bilinear gather is the hot loop of the exact-density / 1-RDM extraction
(n^2 queries per sample). Run with:

    python benchmarks/bench_kernels.py [n ...]
"""

import sys
import time

import numpy as np

from ibtfd._kernels import BACKEND, _fallback, bilinear_gather

try:
    from ibtfd._kernels import _core
except ImportError:
    _core = None


def bench(impl, values, xq, yq, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        impl.bilinear_gather_flat(values, -12.0, 0.1, -12.0, 0.1,
                                  xq.ravel(), yq.ravel())
        best = min(best, time.perf_counter() - start)
    return best


def main():
    sizes = [int(s) for s in sys.argv[1:]] or [256, 512, 1024]
    rng = np.random.default_rng(0)
    print(f"active backend: {BACKEND}")
    print(f"{'n':>6} {'queries':>10} {'numpy (ms)':>12} {'cython (ms)':>12} "
          f"{'speedup':>8}")
    for n in sizes:
        values = np.ascontiguousarray(rng.random((n, n)))
        xq = rng.uniform(-13.0, 13.0, size=(n, n))
        yq = rng.uniform(-13.0, 13.0, size=(n, n))
        t_py = bench(_fallback, values, xq, yq)
        if _core is not None:
            t_cy = bench(_core, values, xq, yq)
            a = _core.bilinear_gather_flat(values, -12.0, 0.1, -12.0, 0.1,
                                           xq.ravel(), yq.ravel())
            b = _fallback.bilinear_gather_flat(values, -12.0, 0.1, -12.0, 0.1,
                                               xq.ravel(), yq.ravel())
            assert np.max(np.abs(a - b)) < 1e-14, "backend mismatch"
            print(f"{n:>6} {n * n:>10} {t_py * 1e3:>12.3f} "
                  f"{t_cy * 1e3:>12.3f} {t_py / t_cy:>8.2f}x")
        else:
            print(f"{n:>6} {n * n:>10} {t_py * 1e3:>12.3f} {'n/a':>12} "
                  f"{'n/a':>8}")


if __name__ == "__main__":
    main()
