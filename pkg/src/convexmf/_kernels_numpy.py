"""Pure-numpy kernel implementations.

Reference backend; `_kernels_numba` mirrors these signatures.  Float paths
assume level <= 7 (cell indices must stay exactly representable); the
dispatch wrappers in `kernels` enforce that.
"""

from __future__ import annotations

import numpy as np

# Ramps narrower than ~2^-45 of a cell are not resolvable in float64; the
# step functions are evaluated without them (exact on every representable
# point that is not strictly inside such a ramp).
_RAMP_FLOAT_LIMIT = 45


def _level_params(l: int) -> tuple[float, float, float, bool]:
    L2 = l * l
    c = 2.0 ** (-L2)
    s = 2.0 ** (-L2 - l)
    use_ramp = (l**4 - L2) <= _RAMP_FLOAT_LIMIT
    W = 2.0 ** (-(l**4)) if use_ramp else 0.0
    return c, s, W, use_ramp


def staircase_values(levels: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Sum over `levels` of the staircase step function at points `x`."""
    out = np.zeros_like(x)
    for l in levels:
        l = int(l)
        c, s, W, use_ramp = _level_params(l)
        inside = (x > 0.0) & (x < 1.0)
        xi = np.where(inside, x, 0.0)
        j = np.floor(xi * (1.0 / c))
        vals = j * s
        if use_ramp:
            r = xi - j * c
            u = r - (c - W)
            on_ramp = inside & (u > 0.0)
            vals = np.where(on_ramp, vals + s * (u / W), vals)
        vals = np.where(inside, vals, 0.0)
        out += vals
        out += np.where(x >= 1.0, 2.0 ** (-l), 0.0)
    return out


def staircase_antiderivative_values(levels: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Sum over `levels` of the staircase antiderivative at points `x`."""
    out = np.zeros_like(x)
    for l in levels:
        l = int(l)
        c, s, W, use_ramp = _level_params(l)
        cells = 2.0 ** (l * l)
        full = s * c * 0.5 * cells * (cells - 1.0)
        if use_ramp:
            full += cells * s * W * 0.5
        inside = (x > 0.0) & (x < 1.0)
        xi = np.where(inside, x, 0.0)
        j = np.floor(xi * (1.0 / c))
        r = xi - j * c
        vals = s * c * 0.5 * j * (j - 1.0) + j * s * r
        if use_ramp:
            vals += j * s * (W * 0.5)
            u = r - (c - W)
            on_ramp = u > 0.0
            vals = np.where(on_ramp, vals + s * u * u / (2.0 * W), vals)
        vals = np.where(inside, vals, 0.0)
        out += vals
        out += np.where(x >= 1.0, full, 0.0)
    return out


def _centered_ticks(cell: int) -> tuple[np.ndarray, float]:
    tc = np.arange(cell, dtype=np.float64) - (cell - 1) / 2.0
    var = float(np.dot(tc, tc))
    return tc, var


def cell_residuals_1d(y: np.ndarray, cell: int) -> np.ndarray:
    """Sup residual of the least-squares affine fit on each cell of `y`.

    `y` holds C*cell consecutive samples; returns C residuals.
    """
    ncells = y.shape[0] // cell
    Y = y[: ncells * cell].reshape(ncells, cell)
    tc, var = _centered_ticks(cell)
    means = Y.mean(axis=1)
    slope = (Y @ tc) / var
    R = Y - means[:, None] - slope[:, None] * tc[None, :]
    return np.abs(R).max(axis=1)


def cell_residuals_2d(z: np.ndarray, cell: int) -> np.ndarray:
    """Per-cell sup residual of least-squares affine fits on a 2-d grid."""
    n1 = z.shape[0] // cell
    n2 = z.shape[1] // cell
    Z = z[: n1 * cell, : n2 * cell].reshape(n1, cell, n2, cell)
    tc, var = _centered_ticks(cell)
    means = Z.mean(axis=(1, 3))
    b1 = np.einsum("ipjq,p->ij", Z, tc) / (var * cell)
    b2 = np.einsum("ipjq,q->ij", Z, tc) / (var * cell)
    R = (
        Z
        - means[:, None, :, None]
        - b1[:, None, :, None] * tc[None, :, None, None]
        - b2[:, None, :, None] * tc[None, None, None, :]
    )
    return np.abs(R).max(axis=(1, 3))


def _half_width(t: np.ndarray, y: np.ndarray, a: float) -> float:
    d = y - a * t
    return float(d.max() - d.min()) * 0.5


def minimax_affine_residual(t: np.ndarray, y: np.ndarray) -> float:
    """Exact minimax residual of the best affine fit to (t, y).

    `t` must be strictly increasing.  The residual as a function of slope
    is convex piecewise-linear with breakpoints at hull edge slopes, so the
    minimum over those candidates is exact.
    """
    n = t.shape[0]
    if n <= 2:
        return 0.0
    best = _half_width(t, y, 0.0)
    for sign in (1.0, -1.0):
        hull_t = [t[0]]
        hull_y = [sign * y[0]]
        for i in range(1, n):
            yi = sign * y[i]
            while len(hull_t) >= 2:
                cross = (hull_t[-1] - hull_t[-2]) * (yi - hull_y[-2]) - (
                    t[i] - hull_t[-2]
                ) * (hull_y[-1] - hull_y[-2])
                if cross >= 0.0:
                    hull_t.pop()
                    hull_y.pop()
                else:
                    break
            hull_t.append(t[i])
            hull_y.append(yi)
        for k in range(1, len(hull_t)):
            a = sign * (hull_y[k] - hull_y[k - 1]) / (hull_t[k] - hull_t[k - 1])
            w = _half_width(t, y, a)
            if w < best:
                best = w
    return best
