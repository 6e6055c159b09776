"""Wall-clock comparison of the RK4 Frenet backends.

Usage: python3 benchmarks/bench_rk4.py [--steps N] [--repeat R]

The numba timing excludes the first (compiling) call.
"""

import argparse
import time

import numpy as np

from curvekit import _kernels


def inputs(n):
    h = 10.0 / n
    s = np.arange(2 * n + 1) * (h / 2)
    return 1 + 0.5 * np.sin(s), 0.3 * np.cos(s), h, np.zeros(3), np.eye(3)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    k, t, h, o, F = inputs(args.steps)
    results = {}
    for backend in _kernels.BACKENDS:
        run = lambda: _kernels.rk4_frenet(k, t, h, o, F, backend=backend)  # noqa: E731
        run()  # warm-up / JIT compile
        results[backend] = best_of(run, args.repeat)
        print(f"{backend:>6}: {results[backend] * 1e3:9.2f} ms for {args.steps} steps")
    if len(results) == 2:
        print(f"speed-up numba/numpy: {results['numpy'] / results['numba']:.1f}x")
        pa = _kernels.rk4_frenet(k, t, h, o, F, backend="numba")[0]
        pb = _kernels.rk4_frenet(k, t, h, o, F, backend="numpy")[0]
        print(f"max position difference: {np.abs(pa - pb).max():.2e}")
    else:
        print("numba unavailable; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
