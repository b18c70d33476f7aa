"""Timing comparison of the pure-numpy kernels against their numba twins.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats 5]

Compiled variants are warmed once before timing so JIT compilation does not
pollute the numbers.  Without numba installed only the numpy column runs.
"""

import argparse
import time

import numpy as np

from seblab import kernels


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def make_cases(rng):
    cases = []

    m = 200
    A = rng.standard_normal((m, 50))
    M = np.ascontiguousarray(A @ A.T)
    c = np.ascontiguousarray(rng.standard_normal(m))
    cases.append(("fw_minimize (m=200, 5000 iters)",
                  "fw_minimize", (M, c, 1e-14, 5000)))

    n, balls = 10, 6
    centers = np.ascontiguousarray(rng.standard_normal((balls, n)) * 0.1)
    radii = np.ascontiguousarray(np.full(balls, 2.0))
    start = np.zeros(n)
    cases.append(("hit_and_run (n=10, 20000 pts)",
                  "hit_and_run", (centers, radii, start, 20000, 100, 5, 7)))

    pts = np.ascontiguousarray(rng.standard_normal((50000, 8)))
    cases.append(("cloud_meb (50000 x 8, 2000 iters)",
                  "cloud_meb", (pts, 2000)))

    g_centers = np.ascontiguousarray(rng.standard_normal((5, 3)))
    theta = np.einsum("ij,ij->i", g_centers, g_centers) - 4.0
    lo, hi = np.full(3, -3.0), np.full(3, 3.0)
    cases.append(("grid_min_maxg (n=3, 151^3 nodes)",
                  "grid_min_maxg", (g_centers, theta, lo, hi, 151)))
    return cases


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repetitions per kernel (best is kept)")
    args = parser.parse_args()

    rng = np.random.default_rng(2024)
    header = f"{'kernel':40s} {'numpy':>10s} {'numba':>10s} {'speedup':>9s}"
    print(header)
    print("-" * len(header))
    for label, name, fargs in make_cases(rng):
        py = getattr(kernels, f"{name}_py")
        t_py = best_of(lambda: py(*fargs), args.repeats)
        if kernels.HAVE_NUMBA:
            nb = getattr(kernels, f"{name}_nb")
            nb(*fargs)  # warm the JIT cache
            t_nb = best_of(lambda: nb(*fargs), args.repeats)
            print(f"{label:40s} {t_py * 1e3:8.2f}ms {t_nb * 1e3:8.2f}ms "
                  f"{t_py / t_nb:8.1f}x")
        else:
            print(f"{label:40s} {t_py * 1e3:8.2f}ms {'n/a':>10s} {'n/a':>9s}")


if __name__ == "__main__":
    main()
