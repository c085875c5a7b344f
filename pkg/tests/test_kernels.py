"""Float kernel contracts: numba/numpy backend agreement, exact-value
cross-checks against the symbolic staircase forms, and refit oracles for
the residual kernels."""

import os
import subprocess
import sys

import numpy as np
import pytest

from convexmf import _kernels_numpy, kernels
from convexmf.constructions import staircase_antiderivative, staircase_value
from convexmf.dyadic import DyadicRational

try:
    from convexmf import _kernels_numba
except ImportError:  # pragma: no cover - numba is installed in CI
    _kernels_numba = None

BACKENDS = [_kernels_numpy] + ([_kernels_numba] if _kernels_numba else [])


def _grid_points(exp: int) -> np.ndarray:
    return np.arange((1 << exp) + 1, dtype=np.float64) * 2.0 ** (-exp)


# ---------------------------------------------------------------------------
# staircase kernels vs the exact closed forms
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.split("_")[-1])
@pytest.mark.parametrize("level", [2, 3])
def test_staircase_values_match_exact_on_dyadic_grid(impl, level):
    # 2^-12 grid points are never strictly inside a ramp that the float
    # path cannot resolve, so equality is exact double by double
    xs = _grid_points(12)
    got = impl.staircase_values(np.array([level], dtype=np.int64), xs)
    for i in (0, 1, 7, 100, len(xs) // 2, len(xs) - 2, len(xs) - 1):
        exact = staircase_value(level, DyadicRational(i, -12))
        assert got[i] == float(exact)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.split("_")[-1])
def test_staircase_values_on_level2_ramp(impl):
    # level-2 ramps occupy [j*2^-4 - 2^-16, j*2^-4]; probe strictly inside
    j = 5
    for k in (1, 7, 15):
        x = DyadicRational(j, -4) - DyadicRational(16 - k, -20)  # u = k*2^-20
        got = impl.staircase_values(
            np.array([2], dtype=np.int64), np.array([float(x)])
        )
        assert got[0] == float(staircase_value(2, x))


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.split("_")[-1])
@pytest.mark.parametrize("level", [2, 3])
def test_antiderivative_values_match_exact_on_dyadic_grid(impl, level):
    xs = _grid_points(12)
    got = impl.staircase_antiderivative_values(np.array([level], dtype=np.int64), xs)
    idx = [0, 1, 63, 1000, len(xs) // 2, len(xs) - 2, len(xs) - 1]
    for i in idx:
        exact = staircase_antiderivative(level, DyadicRational(i, -12))
        assert got[i] == pytest.approx(float(exact), abs=2.0**-52, rel=0)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.split("_")[-1])
def test_multi_level_sum(impl):
    xs = _grid_points(10)
    levels = np.array([2, 3], dtype=np.int64)
    combined = impl.staircase_antiderivative_values(levels, xs)
    separate = sum(
        impl.staircase_antiderivative_values(np.array([l], dtype=np.int64), xs)
        for l in (2, 3)
    )
    np.testing.assert_allclose(combined, separate, rtol=0, atol=2.0**-50)


def test_level_bounds_enforced():
    xs = np.array([0.5])
    with pytest.raises(ValueError):
        kernels.staircase_values(np.array([8]), xs)  # 2^64 cells overflow floats
    with pytest.raises(ValueError):
        kernels.staircase_values(np.array([1]), xs)


# ---------------------------------------------------------------------------
# residual kernels vs refit oracles
# ---------------------------------------------------------------------------


def _lstsq_cell_residuals(y: np.ndarray, cell: int) -> np.ndarray:
    ncells = y.shape[0] // cell
    t = np.arange(cell, dtype=np.float64)
    A = np.column_stack([np.ones(cell), t])
    out = np.empty(ncells)
    for c in range(ncells):
        seg = y[c * cell : (c + 1) * cell]
        coef, *_ = np.linalg.lstsq(A, seg, rcond=None)
        out[c] = np.abs(seg - A @ coef).max()
    return out


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.split("_")[-1])
def test_cell_residuals_1d_against_lstsq_refit(impl):
    rng = np.random.default_rng(7)
    y = np.ascontiguousarray(rng.standard_normal(16 * 37))
    got = impl.cell_residuals_1d(y, 16)
    want = _lstsq_cell_residuals(y, 16)
    np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.split("_")[-1])
def test_cell_residuals_1d_zero_on_affine_data(impl):
    y = np.ascontiguousarray(0.25 + 3.5 * np.arange(64, dtype=np.float64))
    got = impl.cell_residuals_1d(y, 8)
    np.testing.assert_allclose(got, 0.0, atol=1e-12)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.split("_")[-1])
def test_cell_residuals_2d_against_lstsq_refit(impl):
    rng = np.random.default_rng(11)
    z = np.ascontiguousarray(rng.standard_normal((24, 32)))
    cell = 8
    got = impl.cell_residuals_2d(z, cell)
    ii, jj = np.meshgrid(np.arange(cell), np.arange(cell), indexing="ij")
    A = np.column_stack([np.ones(cell * cell), ii.ravel(), jj.ravel()])
    want = np.empty_like(got)
    for a in range(got.shape[0]):
        for b in range(got.shape[1]):
            seg = z[a * cell : (a + 1) * cell, b * cell : (b + 1) * cell].ravel()
            coef, *_ = np.linalg.lstsq(A, seg, rcond=None)
            want[a, b] = np.abs(seg - A @ coef).max()
    np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-12)


def _linprog_minimax(t: np.ndarray, y: np.ndarray) -> float:
    from scipy.optimize import linprog

    n = t.shape[0]
    # variables (a, b, w): minimize w subject to |a + b t - y| <= w
    A_ub = np.block(
        [
            [np.ones((n, 1)), t[:, None], -np.ones((n, 1))],
            [-np.ones((n, 1)), -t[:, None], -np.ones((n, 1))],
        ]
    )
    b_ub = np.concatenate([y, -y])
    res = linprog(
        c=[0.0, 0.0, 1.0],
        A_ub=A_ub,
        b_ub=b_ub,
        bounds=[(None, None)] * 3,
        method="highs",
    )
    assert res.status == 0
    return float(res.fun)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.split("_")[-1])
def test_minimax_residual_against_linear_program(impl):
    rng = np.random.default_rng(3)
    for n in (5, 17, 64):
        t = np.ascontiguousarray(np.sort(rng.random(n)))
        y = np.ascontiguousarray(rng.standard_normal(n))
        got = impl.minimax_affine_residual(t, y)
        want = _linprog_minimax(t, y)
        assert got == pytest.approx(want, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.split("_")[-1])
def test_minimax_residual_known_kink_value(impl):
    # |x - 1/2| over a symmetric grid containing 1/2: band from 0 to 1/2
    t = np.ascontiguousarray(np.linspace(0.0, 1.0, 65))
    y = np.ascontiguousarray(np.abs(t - 0.5))
    assert impl.minimax_affine_residual(t, y) == pytest.approx(0.25, abs=1e-15)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.split("_")[-1])
def test_minimax_residual_never_exceeds_lsq(impl):
    rng = np.random.default_rng(19)
    t = np.ascontiguousarray(np.sort(rng.random(33)))
    y = np.ascontiguousarray(np.cumsum(rng.random(33)))
    A = np.column_stack([np.ones(33), t])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    lsq_sup = float(np.abs(y - A @ coef).max())
    assert impl.minimax_affine_residual(t, y) <= lsq_sup + 1e-15


def test_minimax_validation():
    with pytest.raises(ValueError):
        kernels.minimax_affine_residual(np.array([0.0, 0.0, 1.0]), np.zeros(3))
    with pytest.raises(ValueError):
        kernels.minimax_affine_residual(np.zeros(3), np.zeros(4))
    assert kernels.minimax_affine_residual(np.array([0.0, 1.0]), np.ones(2)) == 0.0


def test_cell_residual_validation():
    with pytest.raises(ValueError):
        kernels.cell_residuals_1d(np.zeros(8), 3)
    with pytest.raises(ValueError):
        kernels.cell_residuals_1d(np.zeros(3), 4)
    with pytest.raises(ValueError):
        kernels.cell_residuals_2d(np.zeros((3, 9)), 4)


# ---------------------------------------------------------------------------
# backend dispatch and agreement
# ---------------------------------------------------------------------------


@pytest.mark.skipif(_kernels_numba is None, reason="numba not installed")
def test_backends_agree_on_random_inputs():
    rng = np.random.default_rng(23)
    levels = np.array([2, 3, 4], dtype=np.int64)
    x = np.ascontiguousarray(rng.random(4096))
    np.testing.assert_allclose(
        _kernels_numba.staircase_values(levels, x),
        _kernels_numpy.staircase_values(levels, x),
        rtol=0,
        atol=1e-15,
    )
    np.testing.assert_allclose(
        _kernels_numba.staircase_antiderivative_values(levels, x),
        _kernels_numpy.staircase_antiderivative_values(levels, x),
        rtol=0,
        atol=1e-15,
    )
    y = np.ascontiguousarray(rng.standard_normal(512))
    np.testing.assert_allclose(
        _kernels_numba.cell_residuals_1d(y, 8),
        _kernels_numpy.cell_residuals_1d(y, 8),
        rtol=1e-12,
        atol=1e-14,
    )
    z = np.ascontiguousarray(rng.standard_normal((64, 64)))
    np.testing.assert_allclose(
        _kernels_numba.cell_residuals_2d(z, 8),
        _kernels_numpy.cell_residuals_2d(z, 8),
        rtol=1e-12,
        atol=1e-14,
    )
    t = np.ascontiguousarray(np.sort(rng.random(100)))
    w = np.ascontiguousarray(rng.standard_normal(100))
    assert _kernels_numba.minimax_affine_residual(t, w) == pytest.approx(
        _kernels_numpy.minimax_affine_residual(t, w), rel=1e-12
    )


def test_env_flag_forces_numpy_backend():
    env = dict(os.environ, CONVEXMF_DISABLE_NUMBA="1")
    code = (
        "import numpy as np\n"
        "from convexmf import kernels\n"
        "print(kernels.backend_name())\n"
        "v = kernels.staircase_antiderivative_values(np.array([2]), "
        "np.array([1.0]))\n"
        "print(repr(float(v[0])))\n"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0, out.stderr
    lines = out.stdout.strip().splitlines()
    assert lines[0] == "numpy"
    assert float(lines[1]) == float(staircase_antiderivative(2, DyadicRational(1, 0)))


def test_active_backend_reports_a_known_name():
    assert kernels.backend_name() in {"numba", "numpy"}
