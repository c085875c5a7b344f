"""Pointwise regularity probes for convex functions on [0,1]^d.

Everything here works from float samples: local affine-residual decay
(an exponent estimate), one-sided derivatives, a derivative-stability
radius with its checker, and direction-cone probes for d in {2, 3}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from . import kernels

__all__ = [
    "ExponentEstimate",
    "holder_estimate",
    "ShiftCheck",
    "exponent_shift_check",
    "DerivativeEstimate",
    "one_sided_derivative",
    "StabilityRadius",
    "GridTooCoarseError",
    "derivative_stability_radius",
    "StabilityCheckReport",
    "stability_check",
    "ConeSystem",
    "build_cone_system",
    "ConeProbeResult",
    "cone_probe",
    "directional_restriction",
]

# Estimates at or above this slope are outside the range an affine local
# fit can certify (fits of degree 1 saturate at 2).
TRUST_CEILING = 2.0


@dataclass(frozen=True)
class ExponentEstimate:
    """Log-log slope of local affine-fit residuals against window radius."""

    point: tuple[float, ...]
    value: float
    cap: float
    scales: tuple[int, ...]
    residuals: tuple[float, ...]
    dropped_scales: tuple[int, ...]
    fit_rms: float
    beyond_range: bool
    saturated: bool

    def __str__(self) -> str:
        flags = []
        if self.beyond_range:
            flags.append("beyond-range")
        if self.saturated:
            flags.append("saturated")
        tag = f" [{', '.join(flags)}]" if flags else ""
        return (
            f"exponent {self.value:.4f} from {len(self.scales)} scales "
            f"(rms {self.fit_rms:.2e}){tag}"
        )


def _fit_loglog(ns: Sequence[int], es: Sequence[float]) -> tuple[float, float]:
    """Slope of log2(residual) against log2(radius), plus fit rms."""
    xs = np.array([-float(n) for n in ns])
    ys = np.log2(np.asarray(es))
    xm, ym = xs.mean(), ys.mean()
    var = float(np.dot(xs - xm, xs - xm))
    slope = float(np.dot(xs - xm, ys - ym)) / var
    resid = ys - ym - slope * (xs - xm)
    return slope, float(np.sqrt(np.mean(resid * resid)))


def _window_residual_1d(
    f: Callable[[np.ndarray], np.ndarray], t: float, n: int, spread_exp: int
) -> float:
    k = np.arange(-(1 << spread_exp), (1 << spread_exp) + 1, dtype=np.float64)
    pts = np.clip(t + k * 2.0 ** (-n - spread_exp), 0.0, 1.0)
    pts = np.unique(pts)
    if pts.size < 3:
        return 0.0
    vals = np.asarray(f(pts), dtype=np.float64)
    return kernels.minimax_affine_residual(pts - t, vals)


def _window_residual_nd(
    f: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    n: int,
    spread_exp: int,
) -> float:
    # least-squares affine sup residual; a constant-factor proxy for the
    # minimax residual, so log-log slopes are unaffected
    d = x.shape[0]
    k = np.arange(-(1 << spread_exp), (1 << spread_exp) + 1, dtype=np.float64)
    axes = [np.clip(x[i] + k * 2.0 ** (-n - spread_exp), 0.0, 1.0) for i in range(d)]
    axes = [np.unique(a) for a in axes]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    if pts.shape[0] < d + 2:
        return 0.0
    vals = np.asarray(f(pts), dtype=np.float64)
    A = np.column_stack([np.ones(pts.shape[0]), pts - x[None, :]])
    coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
    return float(np.abs(vals - A @ coef).max())


def holder_estimate(
    f: Callable[[np.ndarray], np.ndarray],
    t,
    scales: Sequence[int] = tuple(range(4, 13)),
    cap: float = 3.0,
    spread_exp: int = 4,
) -> ExponentEstimate:
    """Estimate the local regularity exponent of f at t.

    Per scale n, samples a lattice on the window of radius 2^-n around t
    (clipped to the domain) and takes the sup residual of the best affine
    fit; the estimate is the least-squares slope of log2 residual against
    log2 radius over scales with nonzero residual.  Residuals below float
    noise count as zero; if fewer than two scales survive the estimate
    saturates at `cap` and is flagged.  Estimates at or above 2 carry
    `beyond_range=True` (degree-1 fits cannot see past slope 2).
    """
    scales = tuple(int(n) for n in scales)
    if len(scales) < 2:
        raise ValueError("need at least two scales")
    if any(n < 1 for n in scales):
        raise ValueError("scales are -log2 radii and must be >= 1")
    x = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError(f"probe point {t!r} outside [0,1]^d")
    used: list[int] = []
    dropped: list[int] = []
    residuals: list[float] = []
    for n in sorted(set(scales)):
        if x.shape[0] == 1:
            e = _window_residual_1d(f, float(x[0]), n, spread_exp)
            ref = float(
                np.abs(f(np.array([float(x[0])]))).max()
            )
        else:
            e = _window_residual_nd(f, x, n, spread_exp)
            ref = float(np.abs(f(x[None, :])).max())
        noise = 64.0 * np.finfo(np.float64).eps * max(1.0, ref)
        if e <= noise:
            dropped.append(n)
        else:
            used.append(n)
            residuals.append(e)
    point = tuple(float(c) for c in x)
    if len(used) < 2:
        return ExponentEstimate(
            point=point,
            value=cap,
            cap=cap,
            scales=tuple(used),
            residuals=tuple(residuals),
            dropped_scales=tuple(dropped),
            fit_rms=0.0,
            beyond_range=True,
            saturated=True,
        )
    slope, rms = _fit_loglog(used, residuals)
    value = min(max(slope, 0.0), cap)
    return ExponentEstimate(
        point=point,
        value=value,
        cap=cap,
        scales=tuple(used),
        residuals=tuple(residuals),
        dropped_scales=tuple(dropped),
        fit_rms=rms,
        # the ceiling comparison needs slack for the log-log fit's own
        # rounding: exact quadratics land at 2 - O(1e-15), not 2
        beyond_range=slope >= TRUST_CEILING - 1e-9,
        saturated=False,
    )


@dataclass(frozen=True)
class ShiftCheck:
    estimate: ExponentEstimate
    derivative_estimate: ExponentEstimate
    gap: float
    tol: float
    consistent: bool
    inconclusive: bool
    reason: str = ""

    def __str__(self) -> str:
        if self.inconclusive:
            return f"shift check inconclusive: {self.reason}"
        verdict = "consistent" if self.consistent else "INCONSISTENT"
        return (
            f"shift check {verdict}: f at {self.estimate.value:.3f}, "
            f"f' at {self.derivative_estimate.value:.3f} "
            f"(gap {self.gap:+.3f}, tol {self.tol})"
        )


def exponent_shift_check(
    f: Callable[[np.ndarray], np.ndarray],
    fprime: Callable[[np.ndarray], np.ndarray],
    t: float,
    scales: Sequence[int] = tuple(range(4, 13)),
    tol: float = 0.25,
    cap: float = 3.0,
) -> ShiftCheck:
    """Check that the exponent of f exceeds the exponent of f' by one.

    Only meaningful when f's exponent lands in [1, 2); outside that band
    (or when either estimate is flagged) the result is inconclusive
    rather than a failure.
    """
    est_f = holder_estimate(f, t, scales, cap=cap)
    est_d = holder_estimate(fprime, t, scales, cap=cap)
    gap = est_f.value - (est_d.value + 1.0)
    if est_f.beyond_range or est_f.value < 1.0:
        return ShiftCheck(
            est_f,
            est_d,
            gap,
            tol,
            consistent=False,
            inconclusive=True,
            reason=(
                f"exponent of f is {est_f.value:.3f}"
                + (" (beyond range)" if est_f.beyond_range else "")
                + "; the shift law is only tested on [1, 2)"
            ),
        )
    if est_d.saturated:
        return ShiftCheck(
            est_f,
            est_d,
            gap,
            tol,
            consistent=False,
            inconclusive=True,
            reason="derivative residuals saturated at float noise",
        )
    return ShiftCheck(
        est_f, est_d, gap, tol, consistent=abs(gap) <= tol, inconclusive=False
    )


# ---------------------------------------------------------------------------
# one-sided derivatives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DerivativeEstimate:
    value: float
    side: int
    quotients: tuple[float, ...]
    bracket: tuple[float, float]
    monotone_ok: bool

    @property
    def bracket_width(self) -> float:
        return self.bracket[1] - self.bracket[0]


def one_sided_derivative(
    f: Callable[[np.ndarray], np.ndarray],
    t: float,
    side: int = 1,
    step_exps: Sequence[int] = tuple(range(12, 23, 2)),
    slack: float = 1e-9,
) -> DerivativeEstimate:
    """One-sided derivative of a convex f via shrinking difference quotients.

    For convex f the quotient is monotone in the step, so the smallest
    step gives the one-sided bound and the Richardson point 2q_k - q_{k-1}
    the other end of the bracket (exact whenever the quotient is affine in
    the step, e.g. f locally quadratic or piecewise affine).  `monotone_ok`
    records whether the sampled quotients behaved convexly (slack absorbs
    float rounding).
    """
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    if len(step_exps) < 2:
        raise ValueError("need at least two steps to bracket the limit")
    steps = np.array([2.0 ** (-q) for q in sorted(step_exps)])
    if side > 0 and t + steps[0] > 1.0 or side < 0 and t - steps[0] < 0.0:
        raise ValueError("steps leave the domain; probe closer to the interior")
    pts = t + side * steps
    base = float(f(np.array([t]))[0])
    quots = (np.asarray(f(pts), dtype=np.float64) - base) / (side * steps)
    # right quotients shrink, left quotients grow, as the step shrinks
    diffs = np.diff(quots)
    ok = bool(np.all(side * diffs <= slack * (1.0 + np.abs(quots[:-1]))))
    last, prev = float(quots[-1]), float(quots[-2])
    lo, hi = sorted((last, 2.0 * last - prev))
    return DerivativeEstimate(
        value=last,
        side=side,
        quotients=tuple(quots),
        bracket=(lo, hi),
        monotone_ok=ok,
    )


# ---------------------------------------------------------------------------
# derivative stability
# ---------------------------------------------------------------------------


class GridTooCoarseError(ValueError):
    """The working grid cannot certify the required oscillation bound."""


@dataclass(frozen=True)
class StabilityRadius:
    rho: float
    eps: float
    grid_exp: int
    node_ticks: tuple[int, ...]
    window_ticks: int
    min_gap_ticks: int
    inserted_first_node: bool

    def __str__(self) -> str:
        return (
            f"rho = {self.rho:.6e} (eps {self.eps}, grid 2^-{self.grid_exp}, "
            f"{len(self.node_ticks)} nodes, min interior gap "
            f"{self.min_gap_ticks} ticks)"
        )


def derivative_stability_radius(
    deriv: Callable[[np.ndarray], np.ndarray],
    eps: float,
    grid_exp: int = 14,
) -> StabilityRadius:
    """Perturbation radius under which one-sided derivatives move < eps.

    Works on the 2^grid_exp tick grid: finds the widest window on which
    the derivative provably oscillates less than eps/4, partitions [0,1]
    into balanced gaps no wider than that, forces the first interior node
    below eps, and returns rho = (eps/4) * (smallest gap after the first).
    """
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    n = 1 << grid_exp
    ticks = np.arange(n + 1, dtype=np.float64) / n
    g = np.asarray(deriv(ticks), dtype=np.float64)
    if not np.all(np.isfinite(g)):
        raise ValueError("derivative values must be finite on [0,1]")
    bound = eps / 4.0

    def osc_ok(w: int) -> bool:
        size = w + 1
        osc = maximum_filter1d(g, size=size) - minimum_filter1d(g, size=size)
        # centered filters pad at the ends; interior windows are what count
        half = size // 2
        lo = half
        hi = n + 1 - (size - 1 - half)
        return bool(np.max(osc[lo:hi]) < bound)

    if not osc_ok(1):
        raise GridTooCoarseError(
            "derivative oscillates >= eps/4 between adjacent grid points; "
            "refine the grid"
        )
    lo_w, hi_w = 1, n
    while lo_w < hi_w:
        mid = (lo_w + hi_w + 1) // 2
        if osc_ok(mid):
            lo_w = mid
        else:
            hi_w = mid - 1
    window = lo_w

    parts = -(-n // window)  # ceil
    base, rem = divmod(n, parts)
    gaps = [base + 1] * rem + [base] * (parts - rem)
    gaps.sort(reverse=True)  # the first gap is excluded from the rho minimum
    nodes = [0]
    for gp in gaps:
        nodes.append(nodes[-1] + gp)

    inserted = False
    if nodes[1] / n >= eps:
        first_tick = math.ceil(eps * n) - 1
        if first_tick < 1:
            raise GridTooCoarseError(
                "no grid tick lies strictly below eps; refine the grid"
            )
        nodes.insert(1, first_tick)
        inserted = True

    interior_gaps = np.diff(nodes)[1:]
    min_gap = int(interior_gaps.min())
    rho = bound * min_gap / n
    return StabilityRadius(
        rho=rho,
        eps=eps,
        grid_exp=grid_exp,
        node_ticks=tuple(nodes),
        window_ticks=window,
        min_gap_ticks=min_gap,
        inserted_first_node=inserted,
    )


@dataclass(frozen=True)
class StabilityCheckReport:
    premise_ok: bool
    max_sup_diff: float
    rho: float
    eps: float
    witnesses: tuple[tuple[float, int, float, float], ...]
    passed: bool

    def __str__(self) -> str:
        if not self.premise_ok:
            return (
                f"premise fails: sup|g - f| = {self.max_sup_diff:.3e} "
                f">= rho = {self.rho:.3e}"
            )
        if self.passed:
            return (
                f"stable: sup|g - f| = {self.max_sup_diff:.3e} < rho, "
                f"one-sided slopes within eps = {self.eps}"
            )
        x, side, q, ref = self.witnesses[0]
        return (
            f"UNSTABLE: at x = {x:.6f} ({'right' if side > 0 else 'left'}) "
            f"slope {q:.6f} vs reference {ref:.6f} (eps {self.eps})"
        )


def stability_check(
    f: Callable[[np.ndarray], np.ndarray],
    fprime: Callable[[np.ndarray], np.ndarray],
    g: Callable[[np.ndarray], np.ndarray],
    radius: StabilityRadius,
    cert_exp: int = 16,
    probe_count: int = 100,
    quot_exp: int = 20,
) -> StabilityCheckReport:
    """Certify sup|g-f| < rho on a dense grid, then scan one-sided
    difference quotients of g against f' at probes in [eps, 1-eps]
    (the guarantee starts past the first partition node, which sits
    below eps).

    Quotients use step 2^-quot_exp as a proxy for the true one-sided
    slopes; perturbations built from pieces that are affine at that scale
    are measured exactly.
    """
    n = 1 << cert_exp
    xs = np.arange(n + 1, dtype=np.float64) / n
    diff = np.abs(np.asarray(g(xs)) - np.asarray(f(xs)))
    max_diff = float(diff.max())
    if max_diff >= radius.rho:
        return StabilityCheckReport(
            premise_ok=False,
            max_sup_diff=max_diff,
            rho=radius.rho,
            eps=radius.eps,
            witnesses=(),
            passed=False,
        )
    if probe_count < 2:
        raise ValueError("need at least two probe points")
    eps = radius.eps
    probes = eps + (1.0 - 2.0 * eps) * np.arange(probe_count) / (probe_count - 1)
    h = 2.0 ** (-quot_exp)
    ref = np.asarray(fprime(probes), dtype=np.float64)
    gp = np.asarray(g(probes), dtype=np.float64)
    witnesses: list[tuple[float, int, float, float]] = []
    for side in (1, -1):
        q = (np.asarray(g(probes + side * h)) - gp) / (side * h)
        bad = np.abs(q - ref) >= radius.eps
        for i in np.nonzero(bad)[0]:
            witnesses.append((float(probes[i]), side, float(q[i]), float(ref[i])))
    return StabilityCheckReport(
        premise_ok=True,
        max_sup_diff=max_diff,
        rho=radius.rho,
        eps=radius.eps,
        witnesses=tuple(witnesses),
        passed=not witnesses,
    )


# ---------------------------------------------------------------------------
# direction cones (d in {2, 3})
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConeSystem:
    dim: int
    points: np.ndarray
    eps: float
    min_pairwise: float
    hull_inradius: float
    perturbed_inradius: float
    covers_half_ball: bool
    perturbation_safe: bool
    zero_margin: bool

    @property
    def count(self) -> int:
        return self.points.shape[0]

    def __str__(self) -> str:
        tag = " (zero margin)" if self.zero_margin else ""
        return (
            f"{self.count} directions in d={self.dim}, eps {self.eps:.3e}, "
            f"inradius {self.hull_inradius:.4f}, perturbed >= "
            f"{self.perturbed_inradius:.4f}{tag}"
        )


def _hull_inradius(pts: np.ndarray) -> float:
    """Distance from the origin to the hull boundary (origin must be inside)."""
    from scipy.spatial import ConvexHull

    hull = ConvexHull(pts)
    # equations rows are (normal, offset) with normal . x + offset <= 0 inside
    return float((-hull.equations[:, -1]).min())


_ICO_LEVELS = (12, 42, 162, 642)


def _icosphere(min_count: int) -> np.ndarray:
    """Unit icosahedron vertices, subdivided until >= min_count points."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            verts += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
    pts = np.asarray(verts)
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    faces = _hull_faces(pts)
    while pts.shape[0] < min_count:
        mids = {}
        new_pts = [tuple(p) for p in pts]
        new_faces = []
        for tri in faces:
            midxs = []
            for k in range(3):
                key = tuple(sorted((tri[k], tri[(k + 1) % 3])))
                if key not in mids:
                    mp = pts[key[0]] + pts[key[1]]
                    mp /= np.linalg.norm(mp)
                    mids[key] = len(new_pts)
                    new_pts.append(tuple(mp))
                midxs.append(mids[key])
            a, b, c = tri
            ab, bc, ca = midxs
            new_faces += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        pts = np.asarray(new_pts)
        faces = new_faces
    return pts


def _hull_faces(pts: np.ndarray) -> list[tuple[int, int, int]]:
    from scipy.spatial import ConvexHull

    return [tuple(s) for s in ConvexHull(pts).simplices]


def build_cone_system(
    dim: int, count: int, seed: int = 0, samples: int = 256
) -> ConeSystem:
    """Well-spread unit directions whose hull surrounds the half ball.

    d=2: the regular count-gon anchored at (1,0); count=3 sits exactly on
    the half ball (accepted, flagged zero-margin), count<3 is an error.
    d=3: icosahedron vertices subdivided until at least `count` points.
    The perturbation budget eps is min pairwise distance / 1000; sampled
    eps-perturbations of the points must keep the hull around B(0, 1/4).
    """
    if dim == 2:
        if count < 3:
            raise ValueError(
                "need at least 3 directions: a 2-point hull has empty "
                "interior and cannot contain the half ball"
            )
        angles = 2.0 * np.pi * np.arange(count) / count
        pts = np.column_stack([np.cos(angles), np.sin(angles)])
        pts[0] = (1.0, 0.0)
    elif dim == 3:
        if count > _ICO_LEVELS[-1]:
            raise ValueError(f"at most {_ICO_LEVELS[-1]} directions supported in d=3")
        pts = _icosphere(max(count, _ICO_LEVELS[0]))
    else:
        raise ValueError("direction cones are built for dimensions 2 and 3 only")

    dists = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    np.fill_diagonal(dists, np.inf)
    min_pair = float(dists.min())
    eps = min_pair / 1000.0
    inradius = _hull_inradius(pts)
    covers = inradius >= 0.5 - 1e-12
    if not covers:
        raise ValueError(
            f"direction hull inradius {inradius:.4f} < 1/2; add directions"
        )
    zero_margin = inradius < 0.5 + 1e-9

    rng = np.random.default_rng(seed)
    worst = np.inf
    # deterministic worst case first: every point pulled straight inward
    worst = min(worst, _hull_inradius(pts * (1.0 - eps)))
    for _ in range(samples):
        d = rng.normal(size=pts.shape)
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        worst = min(worst, _hull_inradius(pts + eps * d))
    return ConeSystem(
        dim=dim,
        points=pts,
        eps=eps,
        min_pairwise=min_pair,
        hull_inradius=inradius,
        perturbed_inradius=worst,
        covers_half_ball=covers,
        perturbation_safe=worst >= 0.25,
        zero_margin=zero_margin,
    )


def directional_restriction(
    f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, direction: np.ndarray
) -> tuple[Callable[[np.ndarray], np.ndarray], float]:
    """Restrict f to the segment x + t*direction inside [0,1]^d.

    Returns (g, T) with g(t) = f(x + t*direction) valid for |t| <= T.
    """
    x = np.asarray(x, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    T = np.inf
    for i in range(x.shape[0]):
        if direction[i] > 0:
            T = min(T, (1.0 - x[i]) / direction[i], x[i] / direction[i])
        elif direction[i] < 0:
            T = min(T, x[i] / -direction[i], (1.0 - x[i]) / -direction[i])
    if not np.isfinite(T) or T <= 0.0:
        raise ValueError("probe point sits on the domain boundary")

    def g(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        return f(x[None, :] + t[:, None] * direction[None, :])

    return g, float(T)


@dataclass(frozen=True)
class ConeProbeResult:
    selected: int
    deviations: tuple[float, ...]
    full_estimate: ExponentEstimate
    cap_estimates: tuple[tuple[float, ...], ...]
    inconclusive: bool
    reason: str = ""

    def __str__(self) -> str:
        if self.inconclusive:
            return f"cone probe inconclusive: {self.reason}"
        return (
            f"cone {self.selected} selected "
            f"(deviation {self.deviations[self.selected]:.4f} from full "
            f"estimate {self.full_estimate.value:.4f})"
        )


def _jitter_directions(z: np.ndarray, count: int, spread: float) -> list[np.ndarray]:
    """z plus small deterministic rotations of z, all unit length."""
    dirs = [z]
    d = z.shape[0]
    if d == 2:
        for k in range(1, count):
            a = spread * (1 if k % 2 else -1) * ((k + 1) // 2)
            rot = np.array(
                [[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]]
            )
            dirs.append(rot @ z)
    else:
        # orthonormal completion of z
        base = np.eye(d)[np.argmin(np.abs(z))]
        u = base - np.dot(base, z) * z
        u /= np.linalg.norm(u)
        v = np.cross(z, u)
        for k in range(1, count):
            a = spread * (1 if k % 2 else -1) * ((k + 1) // 2)
            w = math.cos(a) * z + math.sin(a) * (u if k % 2 else v)
            dirs.append(w / np.linalg.norm(w))
    return dirs[:count]


def cone_probe(
    f: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    cone: ConeSystem,
    scales: Sequence[int] = tuple(range(4, 11)),
    dirs_per_cap: int = 3,
    cap: float = 3.0,
    tolerance: float = 0.5,
    tie_tol: float = 0.05,
) -> ConeProbeResult:
    """Pick the cone whose directional exponents track the full estimate.

    For each cone direction, estimates the exponent of a few 1-d
    restrictions near it and records the worst deviation from the full
    (d-dimensional) estimate.  The smallest index among cones within
    tie_tol of the best deviation wins (deterministic tie-break).  Two
    outcomes are inconclusive rather than a selection: every estimate
    sits at or past the affine trust range (nothing singular to rank,
    e.g. smooth or affine f), or no cone deviates by less than
    `tolerance` (estimator noise).
    """
    x = np.asarray(x, dtype=np.float64)
    full = holder_estimate(f, x, scales, cap=cap)
    spread = math.pi / (4.0 * cone.count)
    deviations: list[float] = []
    cap_values: list[tuple[float, ...]] = []
    any_signal = not (full.saturated or full.beyond_range)
    for zi in range(cone.count):
        vals = []
        dev = 0.0
        for direction in _jitter_directions(cone.points[zi], dirs_per_cap, spread):
            g, T = directional_restriction(f, x, direction)
            usable = [n for n in scales if 2.0 ** (-n) <= T]
            if len(usable) < 2:
                continue
            gg = lambda tt, _g=g: _g(tt - 0.5)  # shift to probe at 1/2 in [0,1]
            est = holder_estimate(gg, 0.5, usable, cap=cap)
            vals.append(est.value)
            if not (est.saturated or est.beyond_range):
                any_signal = True
            dev = max(dev, abs(est.value - full.value))
        deviations.append(dev if vals else np.inf)
        cap_values.append(tuple(vals))
    best = min(deviations)
    selected = next(i for i, d in enumerate(deviations) if d <= best + tie_tol)
    if not any_signal:
        reason = "every restriction is at or past the affine trust range"
    elif best > tolerance:
        reason = f"no cone tracks the full estimate within {tolerance}"
    else:
        reason = ""
    return ConeProbeResult(
        selected=selected,
        deviations=tuple(deviations),
        full_estimate=full,
        cap_estimates=tuple(cap_values),
        inconclusive=bool(reason),
        reason=reason,
    )
