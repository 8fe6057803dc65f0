"""Timing comparison of the compiled kernels against the pure-numpy fallback.

Run with:  python3 benchmarks/bench_kernels.py [n]

Benchmarks the four hot kernels on a grid of n nodes (default 2001) and a
short Crank-Nicolson propagation, printing per-call times and speedups.
"""
import sys
import time

import numpy as np

from pdp.kernels import BACKEND, _ref

try:
    from pdp.kernels import _fast
except ImportError:
    _fast = None


def timeit(fn, *args, repeat=20):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 2001
    rng = np.random.default_rng(0)
    h = 40.0 / (n - 1)
    v = -1.5 / np.cosh(1.5 * np.linspace(-20, 20, n))
    d = 2.0 / h**2 + v + 0j
    dl = np.full(n - 1, -1.0 / h**2, dtype=complex)
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    dr = np.real(d)
    er = np.real(dl)
    sigma = np.zeros(n)
    beta = np.where(np.abs(np.linspace(-20, 20, n)) <= 2, 1.0, 0.0)
    phi = (rng.standard_normal(n) + 1j * rng.standard_normal(n)).astype(complex)

    cases = [
        ("trisolve", lambda m: m.trisolve(dl, d, dl, b)),
        ("sturm_count_below", lambda m: m.sturm_count_below(dr, er, 0.0)),
        ("march_half_bound", lambda m: m.march_half_bound(v, h, True)),
        (
            "cn_step_loop (50 steps)",
            lambda m: m.cn_step_loop(
                -1.0 / h**2, 2.0 / h**2 + v, sigma, beta, 1.0, 2.0, 0.01, 0.0, 50, phi.copy()
            ),
        ),
    ]

    print(f"active backend: {BACKEND}; n = {n}")
    print(f"{'kernel':28s} {'pure (ms)':>12s} {'compiled (ms)':>14s} {'speedup':>9s}")
    for name, call in cases:
        t_ref = timeit(call, _ref) * 1e3
        if _fast is not None:
            t_fast = timeit(call, _fast) * 1e3
            print(f"{name:28s} {t_ref:12.3f} {t_fast:14.3f} {t_ref / t_fast:8.1f}x")
        else:
            print(f"{name:28s} {t_ref:12.3f} {'unavailable':>14s} {'-':>9s}")


if __name__ == "__main__":
    main()
