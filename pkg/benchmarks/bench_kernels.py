"""Compare the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Both backends run the same cases; results are checked for agreement before
timings are reported.
"""
import argparse
import time

import numpy as np

from counterwave import _kernels_py

try:
    from counterwave import _kernels
except ImportError:
    _kernels = None

CASES = [
    ("half period, lambda=10, Q=3", "mathieu_half_period", (10.0, 3.0)),
    ("half period, lambda=1e3, Q=400", "mathieu_half_period", (1e3, 400.0)),
    ("half period, lambda=3e4, Q=1e4", "mathieu_half_period", (3e4, 1e4)),
    ("am on 10^4 points, m=0.9", "jacobi_am_array", (np.linspace(-20.0, 20.0, 10_000), 0.9)),
]


def best_time(func, args, repeat):
    best = np.inf
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = func(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")
        return 1
    print(f"{'case':<36} {'cython [s]':>11} {'python [s]':>11} {'speedup':>8}")
    for label, name, fargs in CASES:
        tc, rc = best_time(getattr(_kernels, name), fargs, args.repeat)
        tp, rp = best_time(getattr(_kernels_py, name), fargs, max(1, args.repeat // 3))
        a = np.asarray(rc[:8] if isinstance(rc, tuple) else rc, dtype=float)
        b = np.asarray(rp[:8] if isinstance(rp, tuple) else rp, dtype=float)
        if not np.allclose(a, b, rtol=1e-9, atol=1e-12):
            raise SystemExit(f"backends disagree on {label}")
        print(f"{label:<36} {tc:>11.4g} {tp:>11.4g} {tp / tc:>7.0f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
