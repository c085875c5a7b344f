"""Numba-jitted kernel implementations (same signatures as _kernels_numpy)."""

from __future__ import annotations

import numpy as np
from numba import njit

_RAMP_FLOAT_LIMIT = 45


@njit(cache=True)
def staircase_values(levels: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros(x.shape[0], dtype=np.float64)
    for li in range(levels.shape[0]):
        l = levels[li]
        L2 = l * l
        c = 2.0 ** (-np.float64(L2))
        inv_c = 2.0 ** np.float64(L2)
        s = 2.0 ** (-np.float64(L2 + l))
        use_ramp = (l**4 - L2) <= _RAMP_FLOAT_LIMIT
        W = 2.0 ** (-np.float64(l**4)) if use_ramp else 0.0
        top = 2.0 ** (-np.float64(l))
        for i in range(x.shape[0]):
            xi = x[i]
            if xi >= 1.0:
                out[i] += top
                continue
            if xi <= 0.0:
                continue
            j = np.floor(xi * inv_c)
            v = j * s
            if use_ramp:
                u = (xi - j * c) - (c - W)
                if u > 0.0:
                    v += s * (u / W)
            out[i] += v
    return out


@njit(cache=True)
def staircase_antiderivative_values(levels: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros(x.shape[0], dtype=np.float64)
    for li in range(levels.shape[0]):
        l = levels[li]
        L2 = l * l
        c = 2.0 ** (-np.float64(L2))
        inv_c = 2.0 ** np.float64(L2)
        s = 2.0 ** (-np.float64(L2 + l))
        cells = 2.0 ** np.float64(L2)
        use_ramp = (l**4 - L2) <= _RAMP_FLOAT_LIMIT
        W = 2.0 ** (-np.float64(l**4)) if use_ramp else 0.0
        full = s * c * 0.5 * cells * (cells - 1.0)
        if use_ramp:
            full += cells * s * W * 0.5
        for i in range(x.shape[0]):
            xi = x[i]
            if xi >= 1.0:
                out[i] += full
                continue
            if xi <= 0.0:
                continue
            j = np.floor(xi * inv_c)
            r = xi - j * c
            v = s * c * 0.5 * j * (j - 1.0) + j * s * r
            if use_ramp:
                v += j * s * (W * 0.5)
                u = r - (c - W)
                if u > 0.0:
                    v += s * u * u / (2.0 * W)
            out[i] += v
    return out


@njit(cache=True)
def cell_residuals_1d(y: np.ndarray, cell: int) -> np.ndarray:
    ncells = y.shape[0] // cell
    out = np.empty(ncells, dtype=np.float64)
    half = (cell - 1) / 2.0
    var = cell * (cell * cell - 1.0) / 12.0
    for ci in range(ncells):
        base = ci * cell
        mean = 0.0
        cov = 0.0
        for k in range(cell):
            mean += y[base + k]
            cov += y[base + k] * (k - half)
        mean /= cell
        slope = cov / var
        worst = 0.0
        for k in range(cell):
            r = abs(y[base + k] - mean - slope * (k - half))
            if r > worst:
                worst = r
        out[ci] = worst
    return out


@njit(cache=True)
def cell_residuals_2d(z: np.ndarray, cell: int) -> np.ndarray:
    n1 = z.shape[0] // cell
    n2 = z.shape[1] // cell
    out = np.empty((n1, n2), dtype=np.float64)
    half = (cell - 1) / 2.0
    var = cell * (cell * cell - 1.0) / 12.0
    for ci in range(n1):
        for cj in range(n2):
            b1 = ci * cell
            b2 = cj * cell
            mean = 0.0
            cov1 = 0.0
            cov2 = 0.0
            for p in range(cell):
                for q in range(cell):
                    v = z[b1 + p, b2 + q]
                    mean += v
                    cov1 += v * (p - half)
                    cov2 += v * (q - half)
            mean /= cell * cell
            s1 = cov1 / (var * cell)
            s2 = cov2 / (var * cell)
            worst = 0.0
            for p in range(cell):
                for q in range(cell):
                    r = abs(
                        z[b1 + p, b2 + q] - mean - s1 * (p - half) - s2 * (q - half)
                    )
                    if r > worst:
                        worst = r
            out[ci, cj] = worst
    return out


@njit(cache=True)
def _half_width(t: np.ndarray, y: np.ndarray, a: float) -> float:
    lo = y[0] - a * t[0]
    hi = lo
    for i in range(1, t.shape[0]):
        d = y[i] - a * t[i]
        if d < lo:
            lo = d
        if d > hi:
            hi = d
    return (hi - lo) * 0.5


@njit(cache=True)
def minimax_affine_residual(t: np.ndarray, y: np.ndarray) -> float:
    n = t.shape[0]
    if n <= 2:
        return 0.0
    best = _half_width(t, y, 0.0)
    hull_t = np.empty(n, dtype=np.float64)
    hull_y = np.empty(n, dtype=np.float64)
    for sign in (1.0, -1.0):
        m = 0
        for i in range(n):
            yi = sign * y[i]
            while m >= 2:
                cross = (hull_t[m - 1] - hull_t[m - 2]) * (yi - hull_y[m - 2]) - (
                    t[i] - hull_t[m - 2]
                ) * (hull_y[m - 1] - hull_y[m - 2])
                if cross >= 0.0:
                    m -= 1
                else:
                    break
            hull_t[m] = t[i]
            hull_y[m] = yi
            m += 1
        for k in range(1, m):
            a = sign * (hull_y[k] - hull_y[k - 1]) / (hull_t[k] - hull_t[k - 1])
            w = _half_width(t, y, a)
            if w < best:
                best = w
    return best
