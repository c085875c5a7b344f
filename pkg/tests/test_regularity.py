"""Exponent estimator calibration, one-sided derivatives, perturbation
stability, and cone probes."""

import math

import numpy as np
import pytest

from convexmf.constructions import compose, staircase_antiderivative, with_spike
from convexmf.constructions import QuadraticBase, ConvexExpr
from convexmf.dyadic import HALF, ONE, DyadicRational
from convexmf.kernels import staircase_antiderivative_values
from convexmf.regularity import (
    TRUST_CEILING,
    GridTooCoarseError,
    build_cone_system,
    cone_probe,
    derivative_stability_radius,
    directional_restriction,
    exponent_shift_check,
    holder_estimate,
    one_sided_derivative,
    stability_check,
)


def _cusp(h: float, c: float = 0.5):
    return lambda t: np.abs(np.asarray(t) - c) ** h


def _cusp_deriv(h: float, c: float = 0.5):
    def fp(t):
        t = np.asarray(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = h * np.sign(t - c) * np.abs(t - c) ** (h - 1.0)
        return np.nan_to_num(out, nan=0.0, posinf=0.0, neginf=0.0)

    return fp


# ---------------------------------------------------------------------------
# exponent estimates
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("h", [1.1, 1.3, 1.5, 1.7, 1.9])
def test_cusp_calibration_within_tenth(h):
    est = holder_estimate(_cusp(h), 0.5)
    assert abs(est.value - h) <= 0.1
    assert not est.saturated and not est.beyond_range
    assert est.point == (0.5,)
    assert len(est.scales) >= 2


def test_smooth_point_flagged_beyond_trust():
    est = holder_estimate(lambda t: np.asarray(t) ** 2, 0.5)
    assert est.beyond_range
    assert est.value >= TRUST_CEILING


def test_affine_saturates_at_cap():
    est = holder_estimate(lambda t: 2.0 * np.asarray(t) + 1.0, 0.5)
    assert est.saturated and est.beyond_range
    assert est.value == est.cap
    assert est.scales == ()  # every scale dropped as zero-residual


def test_low_exponent_cusp():
    est = holder_estimate(_cusp(0.5), 0.5)
    assert abs(est.value - 0.5) <= 0.1


def test_estimate_2d_point():
    f = lambda X: np.abs(X[:, 0] - 0.5) ** 1.5 + 0.25 * (X[:, 1] - 0.5) ** 2
    est = holder_estimate(f, (0.5, 0.5))
    assert est.point == (0.5, 0.5)
    assert abs(est.value - 1.5) <= 0.15


def test_estimate_validation():
    with pytest.raises(ValueError):
        holder_estimate(_cusp(1.5), 0.5, scales=(4,))
    with pytest.raises(ValueError):
        holder_estimate(_cusp(1.5), 0.5, scales=(0, 4))
    with pytest.raises(ValueError):
        holder_estimate(_cusp(1.5), 1.5)


def test_boundary_point_windows_clip():
    est = holder_estimate(_cusp(1.5, c=0.0), 0.0)
    assert abs(est.value - 1.5) <= 0.15


# ---------------------------------------------------------------------------
# exponent shift (f vs f')
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("h", [1.1, 1.5, 1.9])
def test_shift_check_consistent_for_cusps(h):
    chk = exponent_shift_check(_cusp(h), _cusp_deriv(h), 0.5, tol=0.15)
    assert not chk.inconclusive
    assert chk.consistent
    assert abs(chk.gap) <= 0.15


def test_shift_check_flags_mismatched_derivative():
    chk = exponent_shift_check(_cusp(1.5), _cusp_deriv(1.2), 0.5, tol=0.25)
    assert not chk.inconclusive
    assert not chk.consistent


def test_shift_check_inconclusive_outside_band():
    chk = exponent_shift_check(_cusp(0.5), _cusp_deriv(0.5), 0.5)
    assert chk.inconclusive
    assert chk.reason


def test_derivative_jump_point_has_zero_exponent():
    # at a jump of the derivative the two-sided windows keep a constant
    # residual, so the estimated exponent collapses to ~0; paired with a
    # primitive of exponent 1 this is the shifted inequality at its edge
    fp = lambda u: np.sign(np.asarray(u) - 0.5) * (
        1.0 + 1.5 * np.abs(np.asarray(u) - 0.5) ** 0.5
    )
    est = holder_estimate(fp, 0.5)
    assert est.value <= 0.25


# ---------------------------------------------------------------------------
# one-sided derivatives
# ---------------------------------------------------------------------------


def test_one_sided_kink_exact():
    f = lambda t: np.abs(np.asarray(t) - 0.5)
    right = one_sided_derivative(f, 0.5, side=1)
    left = one_sided_derivative(f, 0.5, side=-1)
    assert right.value == 1.0 and right.bracket_width == 0.0
    assert left.value == -1.0 and left.bracket_width == 0.0
    assert right.monotone_ok and left.monotone_ok


def test_one_sided_quadratic_brackets_limit():
    est = one_sided_derivative(lambda t: np.asarray(t) ** 2, 0.25, side=1)
    lo, hi = est.bracket
    assert lo <= 0.5 <= hi
    assert est.bracket_width <= 2.0**-20
    assert est.monotone_ok


def test_one_sided_staircase_antiderivative_frozen():
    f = lambda t: staircase_antiderivative_values(np.array([2]), np.asarray(t))
    est = one_sided_derivative(f, 0.5, side=1)
    # gamma_2(1/2) = 8 * 2^-6 on the plateau; quotient is exactly constant
    assert est.value == 2.0**-3
    assert est.bracket == (2.0**-3, 2.0**-3)
    exact = staircase_antiderivative(2, HALF + DyadicRational(1, -12)) \
        - staircase_antiderivative(2, HALF)
    assert exact == DyadicRational(1, -3) * DyadicRational(1, -12)


def test_one_sided_validation():
    f = lambda t: np.asarray(t) ** 2
    with pytest.raises(ValueError):
        one_sided_derivative(f, 0.5, side=0)
    with pytest.raises(ValueError):
        one_sided_derivative(f, 0.5, step_exps=(12,))
    with pytest.raises(ValueError):
        one_sided_derivative(f, 1.0, side=1)  # no room to the right


def test_one_sided_monotonicity_flag_on_nonconvex():
    est = one_sided_derivative(
        lambda t: np.sin(200.0 * np.asarray(t)), 0.5, step_exps=range(4, 13, 2)
    )
    assert not est.monotone_ok


# ---------------------------------------------------------------------------
# derivative stability
# ---------------------------------------------------------------------------


def test_stability_radius_frozen_for_square():
    radius = derivative_stability_radius(lambda x: 2.0 * np.asarray(x), eps=0.1)
    assert radius.grid_exp == 14
    assert radius.min_gap_ticks == 202
    assert radius.rho == pytest.approx(0.025 * 202 / 16384, rel=1e-12)
    assert radius.node_ticks[0] <= int(0.1 * 16384)  # first node below eps
    gaps = np.diff(radius.node_ticks)
    assert gaps.min() >= 1


def test_stability_radius_too_coarse():
    with pytest.raises(GridTooCoarseError):
        derivative_stability_radius(lambda x: 2.0 * np.asarray(x), eps=1e-5)


def test_stability_check_positive():
    f = lambda x: np.asarray(x) ** 2
    fp = lambda x: 2.0 * np.asarray(x)
    radius = derivative_stability_radius(fp, eps=0.1)
    g = lambda x: np.asarray(x) ** 2 + 0.5 * radius.rho * (np.asarray(x) - 0.4) ** 2
    rep = stability_check(f, fp, g, radius)
    assert rep.premise_ok and rep.passed
    assert rep.max_sup_diff < radius.rho
    assert rep.witnesses == ()


def test_stability_check_kink_perturbation_passes():
    f = lambda x: np.asarray(x) ** 2
    fp = lambda x: 2.0 * np.asarray(x)
    radius = derivative_stability_radius(fp, eps=0.1)
    g = lambda x: np.asarray(x) ** 2 + 0.9 * radius.rho * np.abs(np.asarray(x) - 0.55)
    rep = stability_check(f, fp, g, radius)
    assert rep.passed


def test_stability_check_premise_violation_detected():
    f = lambda x: np.asarray(x) ** 2
    fp = lambda x: 2.0 * np.asarray(x)
    radius = derivative_stability_radius(fp, eps=0.1)
    g = lambda x: np.asarray(x) ** 2 + 10.0 * radius.rho * np.abs(np.asarray(x) - 0.3)
    rep = stability_check(f, fp, g, radius)
    assert not rep.premise_ok and not rep.passed


def test_stability_check_slope_witnesses_on_oscillation():
    # stays inside the sup-norm premise but wiggles the slopes: the scan
    # itself (not the premise) must catch it
    f = lambda x: np.asarray(x) ** 2
    fp = lambda x: 2.0 * np.asarray(x)
    radius = derivative_stability_radius(fp, eps=0.1)
    amp, freq = 0.9 * radius.rho, 1200.0
    g = lambda x: np.asarray(x) ** 2 + amp * np.sin(freq * np.asarray(x))
    rep = stability_check(f, fp, g, radius)
    assert rep.premise_ok
    assert not rep.passed
    assert len(rep.witnesses) > 0


# ---------------------------------------------------------------------------
# cone systems and probes
# ---------------------------------------------------------------------------


def test_cone_system_octagon_geometry():
    cone = build_cone_system(2, 8)
    assert cone.count == 8
    np.testing.assert_allclose(cone.points[0], [1.0, 0.0], atol=1e-15)
    assert cone.min_pairwise == pytest.approx(2.0 * math.sin(math.pi / 8), rel=1e-12)
    assert cone.eps == pytest.approx(2.0 * math.sin(math.pi / 8) / 1000.0, rel=1e-12)
    assert cone.hull_inradius == pytest.approx(math.cos(math.pi / 8), rel=1e-12)
    assert cone.covers_half_ball and cone.perturbation_safe
    assert not cone.zero_margin


def test_cone_system_triangle_zero_margin():
    cone = build_cone_system(2, 3)
    assert cone.hull_inradius == pytest.approx(0.5, rel=1e-12)
    assert cone.zero_margin
    assert cone.covers_half_ball


def test_cone_system_two_points_rejected():
    with pytest.raises(ValueError):
        build_cone_system(2, 2)


def test_cone_system_3d_icosphere():
    cone = build_cone_system(3, 12)
    assert cone.dim == 3 and cone.count >= 12
    np.testing.assert_allclose(np.linalg.norm(cone.points, axis=1), 1.0, atol=1e-12)
    assert cone.covers_half_ball


def test_cone_system_deterministic():
    a = build_cone_system(2, 16, seed=5)
    b = build_cone_system(2, 16, seed=5)
    np.testing.assert_array_equal(a.points, b.points)
    assert a.perturbed_inradius == b.perturbed_inradius


def test_directional_restriction_domain():
    f = lambda X: X[:, 0] + X[:, 1]
    g, T = directional_restriction(f, np.array([0.25, 0.5]), np.array([1.0, 0.0]))
    assert T == 0.25
    assert g(np.array([0.1]))[0] == pytest.approx(0.85)
    with pytest.raises(ValueError):
        directional_restriction(f, np.array([0.0, 0.5]), np.array([1.0, 0.0]))


def _kinked_surface():
    base = QuadraticBase.create(2, quad=[DyadicRational(1, -7), DyadicRational(1, -7)])
    return ConvexExpr(2, base, staircase_levels=(2,))


def test_cone_probe_selects_axis_at_kinks():
    expr = _kinked_surface()
    cone = build_cone_system(2, 16)
    for j in (3, 5, 7):
        res = cone_probe(expr.evaluate, np.array([j / 16.0, 0.5]), cone)
        assert not res.inconclusive
        center = cone.points[res.selected]
        assert min(abs(center[0] - 1.0), abs(center[0] + 1.0)) <= cone.eps
        assert res.deviations[res.selected] <= 0.5


def test_cone_probe_inconclusive_isotropic():
    f = lambda X: 0.1 * ((X[:, 0] - 0.5) ** 2 + (X[:, 1] - 0.5) ** 2)
    cone = build_cone_system(2, 8)
    res = cone_probe(f, np.array([0.5, 0.5]), cone)
    assert res.inconclusive
    assert "trust range" in res.reason


def test_cone_probe_full_estimate_exposed():
    expr = _kinked_surface()
    cone = build_cone_system(2, 8)
    res = cone_probe(expr.evaluate, np.array([5 / 16.0, 0.5]), cone)
    assert abs(res.full_estimate.value - 1.0) <= 0.3
    assert len(res.deviations) == cone.count
    assert len(res.cap_estimates) == cone.count


# ---------------------------------------------------------------------------
# composite expressions under the estimator
# ---------------------------------------------------------------------------


def test_spike_boundary_flat_interior_smooth():
    base = QuadraticBase.create(2, quad=[ONE, ONE])
    expr = with_spike(compose((), dim=2, base=base), 5)
    scales = tuple(range(4, 12))
    est = holder_estimate(expr.evaluate, (0.0, 0.5), scales)
    assert est.value <= 0.3
    interior = holder_estimate(expr.evaluate, (0.5, 0.5), scales)
    assert interior.value >= 1.0
