"""Coarse singularity spectra: empirical estimation from grid samples and
the closed-form theoretical curves they are compared against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels

__all__ = [
    "SPECTRUM_KINDS",
    "theoretical_spectrum",
    "SpectrumCurve",
    "empirical_spectrum",
    "BoundCheck",
    "check_upper_bound",
    "sample_grid",
]

NEG_INF = float("-inf")

SPECTRUM_KINDS = (
    "convex-upper",
    "convex-typical",
    "monotone-1d",
    "monotone-1d-upper",
    "monotone-multi",
    "measure-typical",
)


def theoretical_spectrum(kind: str, d: int, h: float) -> float:
    """Closed-form spectrum value; -inf marks exponents that do not occur.

    All kinds accept any d >= 1 except monotone-1d / monotone-1d-upper,
    which are one-dimensional statements.  Negative h is an error
    (exponents are nonnegative).
    """
    if kind not in SPECTRUM_KINDS:
        raise ValueError(f"unknown spectrum kind {kind!r}; use one of {SPECTRUM_KINDS}")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if not math.isfinite(h) or h < 0:
        raise ValueError(f"exponent must be finite and >= 0; got {h}")
    if kind in ("monotone-1d", "monotone-1d-upper") and d != 1:
        raise ValueError(f"{kind} is one-dimensional")
    if kind == "convex-upper":
        if h < 1.0:
            return float(d - 1)
        if h <= 2.0:
            return d + h - 2.0
        return float(d)
    if kind == "convex-typical":
        if h == 0.0:
            return float(d - 1)
        if h < 1.0:
            return NEG_INF
        if h <= 2.0:
            return d + h - 2.0
        return NEG_INF
    if kind == "monotone-1d":
        return h if h <= 1.0 else NEG_INF
    if kind == "monotone-1d-upper":
        return min(h, 1.0)
    if kind == "monotone-multi":
        return d - 1.0 + h if h <= 1.0 else NEG_INF
    # measure-typical
    return h if h <= float(d) else NEG_INF


@dataclass(frozen=True)
class SpectrumCurve:
    """Empirical coarse spectrum: per-exponent-bin growth rates of cell
    counts across dyadic scales."""

    d: int
    grid_exp: int
    delta: float
    cap: float
    scales: tuple[int, ...]
    bin_centers: tuple[float, ...]
    values: tuple[float, ...]
    counts: tuple[tuple[int, ...], ...]  # [scale][bin]
    boundary_counts: tuple[tuple[int, ...], ...]

    def populated(self, b: int) -> tuple[int, ...]:
        return tuple(
            m for i, m in enumerate(self.scales) if self.counts[i][b] > 0
        )

    def csv_rows(self, kind: str = "empirical") -> list[list[str]]:
        """Rows of (h, value, kind, delta, scale range); -inf is literal."""
        scale_range = f"{self.scales[0]}:{self.scales[-1]}"
        rows = [["h", "value", "kind", "delta", "scales"]]
        for h, v in zip(self.bin_centers, self.values):
            rows.append(
                [
                    f"{h:.6g}",
                    "-inf" if v == NEG_INF else f"{v:.6g}",
                    kind,
                    f"{self.delta:.6g}",
                    scale_range,
                ]
            )
        return rows

    def to_json_obj(self, kind: str = "empirical") -> dict:
        """JSON-ready dict; -inf becomes the explicit string marker."""
        return {
            "kind": kind,
            "d": self.d,
            "grid_exp": self.grid_exp,
            "delta": self.delta,
            "cap": self.cap,
            "scales": list(self.scales),
            "bins": [
                {
                    "h": h,
                    "value": "-inf" if v == NEG_INF else v,
                    "counts": [self.counts[i][b] for i in range(len(self.scales))],
                    "boundary_counts": [
                        self.boundary_counts[i][b] for i in range(len(self.scales))
                    ],
                }
                for b, (h, v) in enumerate(zip(self.bin_centers, self.values))
            ],
        }

    def __str__(self) -> str:
        populated = [
            f"[{h:.3f}: {v:.3f} @{len(self.populated(b))} scales]"
            for b, (h, v) in enumerate(zip(self.bin_centers, self.values))
            if v != NEG_INF
        ]
        return (
            f"spectrum d={self.d} n={self.grid_exp} delta={self.delta}: "
            + " ".join(populated)
        )


def _alpha_from_residuals(res: np.ndarray, m: int, cap: float, ref: float) -> np.ndarray:
    noise = 64.0 * np.finfo(np.float64).eps * max(1.0, ref)
    alpha = np.full(res.shape, cap)
    live = res > noise
    alpha[live] = np.clip(-np.log2(res[live]) / m, 0.0, cap)
    return alpha


def empirical_spectrum(
    values: np.ndarray,
    d: int,
    delta: float = 0.125,
    scales: Optional[Sequence[int]] = None,
    cap: float = 3.0,
) -> SpectrumCurve:
    """Estimate the coarse spectrum from samples on the dyadic grid.

    `values` holds f on the inclusive 2^n+1 grid (per axis, d in {1,2});
    the last sample is dropped so cells tile evenly.  Per scale m the grid
    splits into 2^m cells per axis; each interior cell contributes the
    exponent -log2(residual)/m of its best affine fit (zero residual means
    the cell saturates at `cap`).  Cells touching the boundary are tallied
    separately.  A bin's value is the least-squares slope of log2 count
    against m over populated scales, clipped to [0, d]; bins populated at
    fewer than two scales get -inf (one point cannot pin a growth rate).
    """
    if d not in (1, 2):
        raise ValueError("empirical spectra are implemented for d in {1, 2}")
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != d:
        raise ValueError(f"expected a {d}-dimensional sample grid")
    side = values.shape[0]
    n = int(math.log2(side - 1)) if side > 1 else 0
    if (1 << n) + 1 != side or any(s != side for s in values.shape):
        raise ValueError("grid must be inclusive with 2^n + 1 samples per axis")
    if not (0.0 < delta <= 1.0):
        raise ValueError("bin width must lie in (0, 1]")
    if scales is None:
        # default band 6..min(n-2, 14): coarse enough to average out the
        # affine fit, fine enough to keep >= 4 samples per cell
        scales = tuple(range(6, min(n - 2, 14) + 1))
        if len(scales) < 2:
            raise ValueError(
                f"grid exponent {n} leaves fewer than two default scales; "
                "pass scales explicitly or sample a finer grid"
            )
    scales = tuple(int(m) for m in scales)
    if len(scales) < 2:
        raise ValueError("need at least two scales")
    if max(scales) > n - 2:
        raise ValueError(
            f"scale 2^-{max(scales)} leaves fewer than 4 samples per cell "
            f"at grid exponent {n}"
        )
    nbins = int(round(cap / delta)) + 1
    ref = float(np.abs(values).max())
    counts = np.zeros((len(scales), nbins), dtype=np.int64)
    boundary = np.zeros((len(scales), nbins), dtype=np.int64)
    body = values[tuple(slice(0, side - 1) for _ in range(d))]
    for si, m in enumerate(scales):
        cell = 1 << (n - m)
        if d == 1:
            res = kernels.cell_residuals_1d(body, cell)
            alpha = _alpha_from_residuals(res, m, cap, ref)
            is_boundary = np.zeros(res.shape[0], dtype=bool)
            is_boundary[0] = is_boundary[-1] = True
        else:
            res = kernels.cell_residuals_2d(body, cell)
            alpha = _alpha_from_residuals(res, m, cap, ref)
            is_boundary = np.zeros(res.shape, dtype=bool)
            is_boundary[0, :] = is_boundary[-1, :] = True
            is_boundary[:, 0] = is_boundary[:, -1] = True
        bins = np.minimum((alpha / delta).astype(np.int64), nbins - 1)
        for where, target in ((~is_boundary, counts), (is_boundary, boundary)):
            b, c = np.unique(bins[where], return_counts=True)
            target[si, b] += c
    bin_values = []
    for b in range(nbins):
        pop = [(m, counts[si, b]) for si, m in enumerate(scales) if counts[si, b] > 0]
        if len(pop) < 2:
            bin_values.append(NEG_INF)
            continue
        xs = np.array([float(m) for m, _ in pop])
        ys = np.log2(np.array([float(c) for _, c in pop]))
        xm, ym = xs.mean(), ys.mean()
        slope = float(np.dot(xs - xm, ys - ym) / np.dot(xs - xm, xs - xm))
        bin_values.append(min(max(slope, 0.0), float(d)))
    return SpectrumCurve(
        d=d,
        grid_exp=n,
        delta=delta,
        cap=cap,
        scales=scales,
        bin_centers=tuple((b + 0.5) * delta for b in range(nbins)),
        values=tuple(bin_values),
        counts=tuple(tuple(int(c) for c in row) for row in counts),
        boundary_counts=tuple(tuple(int(c) for c in row) for row in boundary),
    )


@dataclass(frozen=True)
class BoundCheck:
    margin: float
    violations: tuple[tuple[float, float, float], ...]  # (h, value, bound)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return f"upper bound holds (margin {self.margin})"
        h, v, b = self.violations[0]
        return (
            f"upper bound VIOLATED at h = {h:.4f}: value {v:.4f} > "
            f"{b:.4f} + {self.margin}"
        )


def check_upper_bound(curve: SpectrumCurve, margin: float = 0.15) -> BoundCheck:
    """Compare an empirical curve against the convex upper spectrum at the
    curve's own dimension (valid for every d >= 1)."""
    violations = []
    for h, v in zip(curve.bin_centers, curve.values):
        if v == NEG_INF:
            continue
        bound = theoretical_spectrum("convex-upper", curve.d, h)
        if v > bound + margin:
            violations.append((h, v, bound))
    return BoundCheck(margin=margin, violations=tuple(violations))


def sample_grid(evaluate, d: int, n: int, chunk: int = 1 << 20) -> np.ndarray:
    """Sample a callable on the inclusive 2^n+1 dyadic grid (d in {1,2})."""
    side = (1 << n) + 1
    axis = np.arange(side, dtype=np.float64) * 2.0 ** (-n)
    if d == 1:
        out = np.empty(side)
        for lo in range(0, side, chunk):
            hi = min(lo + chunk, side)
            out[lo:hi] = evaluate(axis[lo:hi, None])
        return out
    if d == 2:
        out = np.empty((side, side))
        rows_per_chunk = max(1, chunk // side)
        for r0 in range(0, side, rows_per_chunk):
            r1 = min(r0 + rows_per_chunk, side)
            xs = np.repeat(axis[r0:r1], side)
            ys = np.tile(axis, r1 - r0)
            out[r0:r1, :] = evaluate(np.column_stack([xs, ys])).reshape(
                r1 - r0, side
            )
        return out
    raise ValueError("sampling is implemented for d in {1, 2}")
