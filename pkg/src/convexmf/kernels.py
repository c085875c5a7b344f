"""Kernel dispatch: numba-jitted implementations with a numpy fallback.

Set CONVEXMF_DISABLE_NUMBA=1 (before import) to force the numpy backend;
it is also selected automatically when numba is not importable.  Both
backends implement identical contracts and are compared in the test suite
and in benchmarks/bench_kernels.py.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_numpy

_env = os.environ.get("CONVEXMF_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _env in {"1", "true", "yes", "on"}

if _DISABLED:
    _impl = _kernels_numpy
    _BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _impl  # type: ignore[no-redef]

        _BACKEND = "numba"
    except ImportError:
        _impl = _kernels_numpy
        _BACKEND = "numpy"


def backend_name() -> str:
    """Name of the active kernel backend ('numba' or 'numpy')."""
    return _BACKEND


# Float paths index cells as exact float64 integers, which caps the usable
# level: 2^(l*l) must stay below 2^53.
MAX_FLOAT_LEVEL = 7


def _check_levels(levels: np.ndarray) -> np.ndarray:
    levels = np.asarray(levels, dtype=np.int64)
    if levels.size and int(levels.max()) > MAX_FLOAT_LEVEL:
        raise ValueError(
            f"float kernels support levels <= {MAX_FLOAT_LEVEL}; "
            "use the exact evaluation path instead"
        )
    if levels.size and int(levels.min()) < 2:
        raise ValueError("staircase levels must be >= 2")
    return levels


def staircase_values(levels, x) -> np.ndarray:
    levels = _check_levels(levels)
    x = np.ascontiguousarray(x, dtype=np.float64)
    return _impl.staircase_values(levels, x)


def staircase_antiderivative_values(levels, x) -> np.ndarray:
    levels = _check_levels(levels)
    x = np.ascontiguousarray(x, dtype=np.float64)
    return _impl.staircase_antiderivative_values(levels, x)


def cell_residuals_1d(y, cell: int) -> np.ndarray:
    y = np.ascontiguousarray(y, dtype=np.float64)
    if cell < 4:
        raise ValueError("cells need at least 4 samples for a residual")
    if y.shape[0] < cell:
        raise ValueError("fewer samples than one cell")
    return _impl.cell_residuals_1d(y, cell)


def cell_residuals_2d(z, cell: int) -> np.ndarray:
    z = np.ascontiguousarray(z, dtype=np.float64)
    if cell < 4:
        raise ValueError("cells need at least 4 samples per axis")
    if z.shape[0] < cell or z.shape[1] < cell:
        raise ValueError("fewer samples than one cell")
    return _impl.cell_residuals_2d(z, cell)


def minimax_affine_residual(t, y) -> float:
    t = np.ascontiguousarray(t, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if t.shape != y.shape:
        raise ValueError("t and y must have matching shapes")
    if t.shape[0] >= 2 and not np.all(np.diff(t) > 0):
        raise ValueError("sample abscissae must be strictly increasing")
    return float(_impl.minimax_affine_residual(t, y))
