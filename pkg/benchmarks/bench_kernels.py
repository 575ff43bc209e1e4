"""Compare the compiled grid kernel against the pure-numpy fallback.

Both backends are imported side by side (the env-var switch in
``tdho._kernels`` only picks which one the package re-exports), so a single
run times the same calls through each implementation and checks that the
results still agree.

Usage:
    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --points 65536 --repeats 50
"""

import argparse
import math
import timeit

import numpy as np

from tdho._kernels import _ref

try:
    from tdho._kernels import _core
except ImportError:
    _core = None


# Representative kernel arguments: a breathing, displaced state sampled on a
# wide grid, so both the underflow short-circuit and the Hermite recurrence
# see realistic work.
RHO = 1.4
OMEGA = 2.0
HBAR = 1.0
X_SHIFT = -0.4
K_LIN = 2.3
PHASE0 = 0.7


def kernel_args(n, points):
    x = np.linspace(-14.0, 14.0, points)
    log_norm = (
        0.25 * math.log(OMEGA / (math.pi * HBAR))
        - 0.5 * (n * math.log(2.0) + math.lgamma(n + 1))
        - 0.5 * math.log(RHO)
    )
    gauss_re = -0.5 * OMEGA / (HBAR * RHO * RHO)
    gauss_im = 0.35
    scale = math.sqrt(OMEGA / HBAR) / RHO
    return (x, n, log_norm, gauss_re, gauss_im, scale, X_SHIFT, K_LIN, PHASE0)


def best_of(fn, args, repeats):
    best = math.inf
    for _ in range(repeats):
        start = timeit.default_timer()
        fn(*args)
        best = min(best, timeit.default_timer() - start)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=32768, help="grid points")
    ap.add_argument("--repeats", type=int, default=30, help="timed repeats (best kept)")
    ap.add_argument("--orders", type=int, nargs="+", default=[0, 2, 8, 32],
                    help="quantum numbers to benchmark")
    args = ap.parse_args()

    if _core is None:
        print("compiled backend not importable; timing the numpy fallback only")

    print(f"state_kernel on {args.points} points, best of {args.repeats}")
    header = f"{'n':>4}  {'numpy':>10}  {'cython':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in args.orders:
        ka = kernel_args(n, args.points)
        t_ref = best_of(_ref.state_kernel, ka, args.repeats)
        if _core is None:
            print(f"{n:>4}  {t_ref * 1e3:>8.3f}ms")
            continue
        t_core = best_of(_core.state_kernel, ka, args.repeats)
        err = np.max(np.abs(_core.state_kernel(*ka) - _ref.state_kernel(*ka)))
        assert err < 1e-12, f"backends disagree at n={n}: {err:.3e}"
        print(f"{n:>4}  {t_ref * 1e3:>8.3f}ms  {t_core * 1e3:>8.3f}ms  {t_ref / t_core:>7.2f}x")

    if _core is not None:
        print()
        print(f"hermite_values on {args.points} points, best of {args.repeats}")
        print(header)
        print("-" * len(header))
        xi = np.linspace(-6.0, 6.0, args.points)
        for n in args.orders:
            t_ref = best_of(_ref.hermite_values, (n, xi), args.repeats)
            t_core = best_of(_core.hermite_values, (n, xi), args.repeats)
            print(f"{n:>4}  {t_ref * 1e3:>8.3f}ms  {t_core * 1e3:>8.3f}ms  "
                  f"{t_ref / t_core:>7.2f}x")


if __name__ == "__main__":
    main()
