"""Benchmark the compiled DG kernels against the pure-NumPy fallback.

Usage: python benchmarks/bench_kernels.py [repeats]

Shapes mirror the solver's hot paths: quadratic through quartic bases on
meshes from desk scale up to the shock-vortex grid.
"""

import sys
import time

import numpy as np

from ocad.dg import _kernels_py as pure

try:
    from ocad.dg import _kernels as compiled
except ImportError:
    compiled = None


CASES = [
    # (rows, nmodes, npts) ~ (cells*comps, modes, check/face points)
    ("k=2 scalar 40x40 traces", 1_600, 6, 12),
    ("k=2 euler 150x75 traces", 45_000, 6, 12),
    ("k=2 scalar 160x160 vol", 25_600, 6, 16),
    ("k=4 scalar 60x60 checks", 3_600, 15, 33),
]


def time_call(fn, *args, repeats=7):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 7
    if compiled is None:
        print("compiled kernels unavailable; showing pure-NumPy timings only")
    rng = np.random.default_rng(0)
    header = f"{'case':<28} {'op':<16} {'numpy':>10} {'compiled':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, rows, nm, npts in CASES:
        c = np.ascontiguousarray(rng.standard_normal((rows, nm)))
        B = np.ascontiguousarray(rng.standard_normal((nm, npts)))
        d = rng.uniform(0, 1, rows)
        u1, u2, f1, f2 = rng.standard_normal((4, rows, npts))
        ops = {
            "eval_points": (c, B),
            "eval_minmax": (c, B),
            "scale_about_mean": (c, d),
            "lf_flux": (u1, u2, f1, f2, 1.3),
        }
        for op, args in ops.items():
            t_py = time_call(getattr(pure, op), *args, repeats=repeats)
            if compiled is not None:
                t_c = time_call(getattr(compiled, op), *args, repeats=repeats)
                print(
                    f"{name:<28} {op:<16} {t_py * 1e6:>8.0f}us {t_c * 1e6:>8.0f}us "
                    f"{t_py / t_c:>7.2f}x"
                )
            else:
                print(f"{name:<28} {op:<16} {t_py * 1e6:>8.0f}us {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
