"""Timing comparison of the numba and numpy kernel backends.

Run as a script: `python benchmarks/bench_kernels.py [--repeat N]`.
Both backends are imported directly (bypassing the env-flag dispatch in
convexmf.kernels), warmed up, timed best-of-N, and cross-checked for
agreement before any number is reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from convexmf import _kernels_numpy

try:
    from convexmf import _kernels_numba
except ImportError:
    _kernels_numba = None


def _time_best(fn, args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _cases() -> list[tuple[str, str, tuple]]:
    rng = np.random.default_rng(0)
    levels = np.array([2, 3, 5], dtype=np.int64)
    x_big = np.ascontiguousarray(rng.random(1 << 20))
    y_big = np.ascontiguousarray(np.abs(x_big - 0.5) ** 1.3)
    z = np.ascontiguousarray(rng.random((1025, 1025)))
    t = np.ascontiguousarray(np.linspace(0.0, 1.0, 4097))
    yt = np.ascontiguousarray(np.abs(t - 0.37) ** 1.5)
    return [
        ("staircase_values", "3 levels, 2^20 points", (levels, x_big)),
        ("staircase_antiderivative_values", "3 levels, 2^20 points", (levels, x_big)),
        ("cell_residuals_1d", "2^20 samples, cell 64", (y_big, 64)),
        ("cell_residuals_2d", "1025^2 samples, cell 32", (z, 32)),
        ("minimax_affine_residual", "4097 samples", (t, yt)),
    ]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5, help="best-of-N timing")
    ns = ap.parse_args()

    if _kernels_numba is None:
        print("numba backend unavailable; timing the numpy backend only")

    rows = []
    for name, desc, args in _cases():
        np_fn = getattr(_kernels_numpy, name)
        ref = np.asarray(np_fn(*args))
        np_time = _time_best(np_fn, args, ns.repeat)
        if _kernels_numba is not None:
            nb_fn = getattr(_kernels_numba, name)
            got = np.asarray(nb_fn(*args))  # warmup doubles as agreement check
            err = float(np.max(np.abs(got - ref))) if ref.size else 0.0
            if err > 1e-12:
                raise SystemExit(f"{name}: backends disagree by {err:.3e}")
            nb_time = _time_best(nb_fn, args, ns.repeat)
            rows.append((name, desc, np_time, nb_time))
        else:
            rows.append((name, desc, np_time, None))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'case':<24} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, desc, np_time, nb_time in rows:
        np_ms = f"{np_time * 1e3:8.2f}ms"
        if nb_time is None:
            print(f"{name:<{width}}  {desc:<24} {np_ms:>10} {'-':>10} {'-':>8}")
        else:
            nb_ms = f"{nb_time * 1e3:8.2f}ms"
            print(
                f"{name:<{width}}  {desc:<24} {np_ms:>10} {nb_ms:>10} "
                f"{np_time / nb_time:7.1f}x"
            )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
