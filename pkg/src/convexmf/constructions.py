"""Convex building blocks: staircase antiderivatives, boundary spikes,
scale-sequence validation, composite expressions, and mollification.

All level-l staircase quantities are exact dyadic rationals, so the exact
evaluation paths never round.  Float paths go through the kernel backend.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import kernels
from .dyadic import ONE, ZERO, DyadicRational, parse_dyadic

__all__ = [
    "StaircaseLevel",
    "staircase_value",
    "staircase_antiderivative",
    "boundary_spike_values",
    "SequenceReport",
    "InvalidSequenceError",
    "validate_scale_sequence",
    "require_scale_sequence",
    "find_scale_sequence",
    "QuadraticBase",
    "SmoothedPart",
    "ConvexExpr",
    "compose",
    "with_spike",
    "mollify",
    "mollify_values",
    "quadrature_lattice",
    "ConvexityReport",
    "second_difference_scan",
    "convexity_check",
]

DyLike = Union[DyadicRational, int]


def _dy(x: DyLike) -> DyadicRational:
    return x if isinstance(x, DyadicRational) else DyadicRational(int(x), 0)


# ---------------------------------------------------------------------------
# staircase family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StaircaseLevel:
    """Exact parameters of the level-l staircase step function.

    2^(l*l) cells on [0,1]; on cell j the function holds the plateau value
    j*step and climbs by one step over the final ramp_width of the cell.
    """

    level: int

    def __post_init__(self) -> None:
        if self.level < 2:
            raise ValueError(
                "staircase level must be >= 2 (level 1 has a single plateau "
                "spanning all of [0,1] and carries no structure)"
            )

    @property
    def cell_count(self) -> int:
        return 1 << (self.level * self.level)

    @property
    def cell_width(self) -> DyadicRational:
        return DyadicRational(1, -(self.level * self.level))

    @property
    def ramp_width(self) -> DyadicRational:
        return DyadicRational(1, -(self.level**4))

    @property
    def step(self) -> DyadicRational:
        return DyadicRational(1, -(self.level * self.level + self.level))

    @property
    def top(self) -> DyadicRational:
        """Value at x = 1: cell_count * step = 2^-level."""
        return DyadicRational(1, -self.level)


def _locate(l: int, x: DyadicRational) -> tuple[int, DyadicRational]:
    """Cell index j and within-cell offset r = x - j*cell_width."""
    L2 = l * l
    j = x.floor_mul_pow2(L2)
    r = x - DyadicRational(j, -L2) if j else x
    return j, r


def staircase_value(l: int, x: DyadicRational) -> DyadicRational:
    """Exact level-l staircase step value at a dyadic x in [0, 1]."""
    StaircaseLevel(l)
    if x < ZERO or x > ONE:
        raise ValueError(f"staircase domain is [0,1]; got {x}")
    if x == ONE:
        return DyadicRational(1, -l)
    L2 = l * l
    L4 = l**4
    j, r = _locate(l, x)
    s = DyadicRational(1, -(L2 + l))
    plateau_end = DyadicRational((1 << (L4 - L2)) - 1, -L4)  # cell - ramp
    val = DyadicRational(j, -(L2 + l)) if j else ZERO
    if r > plateau_end:
        u = r - plateau_end
        val = val + s * u.scale(L4)  # s * (u / ramp_width)
    return val


def staircase_antiderivative(l: int, x: DyadicRational) -> DyadicRational:
    """Exact integral of the level-l staircase step from 0 to x.

    Closed form: with j = floor(x * 2^(l*l)) and r = x - j*cell_width,
    the full cells contribute step*cell*j*(j-1)/2 + j*step*ramp/2 and the
    partial cell contributes j*step*r plus a quadratic ramp tail.
    """
    StaircaseLevel(l)
    if x < ZERO or x > ONE:
        raise ValueError(f"staircase domain is [0,1]; got {x}")
    L2 = l * l
    L4 = l**4
    if x == ONE:
        j = 1 << L2
        r = ZERO
        partial = ZERO
    else:
        j, r = _locate(l, x)
        s = DyadicRational(1, -(L2 + l))
        partial = DyadicRational(j, -(L2 + l)) * r if j else ZERO
        plateau_end = DyadicRational((1 << (L4 - L2)) - 1, -L4)
        if r > plateau_end:
            u = r - plateau_end
            partial = partial + (s * u * u).scale(L4 - 1)  # s*u^2/(2*ramp)
    full = DyadicRational(j * (j - 1), -(2 * L2 + l + 1)) + DyadicRational(
        j, -(L4 + L2 + l + 1)
    )
    return full + partial


def boundary_spike_values(l: int, x: np.ndarray) -> np.ndarray:
    """Convex boundary spike: slope -l^(l-1) until x = l^-l, then flat -1/l.

    The kink abscissa l^-l is not dyadic for l >= 3, so this piece is
    float-only; exact evaluation is deliberately not offered.
    """
    if l < 2:
        raise ValueError("spike level must be >= 2")
    x = np.asarray(x, dtype=np.float64)
    knee = float(l) ** (-l)
    return np.where(x <= knee, -(float(l) ** (l - 1)) * x, -1.0 / l)


def boundary_spike_slopes(l: int, x: np.ndarray) -> np.ndarray:
    """Right derivative of the boundary spike."""
    x = np.asarray(x, dtype=np.float64)
    knee = float(l) ** (-l)
    return np.where(x < knee, -(float(l) ** (l - 1)), 0.0)


# ---------------------------------------------------------------------------
# scale sequences
# ---------------------------------------------------------------------------


class InvalidSequenceError(ValueError):
    """A scale sequence violates one of the admissibility conditions."""


@dataclass(frozen=True)
class SequenceReport:
    entries: tuple[int, ...]
    ok: bool
    failures: tuple[str, ...]

    def __str__(self) -> str:
        if self.ok:
            return f"sequence {self.entries}: admissible"
        lines = [f"sequence {self.entries}: inadmissible"]
        lines += [f"  - {f}" for f in self.failures]
        return "\n".join(lines)


def _sequence_failures(entries: Sequence[int], start: int = 1) -> list[str]:
    failures: list[str] = []
    prev = 1
    depth_log = 0  # sum of log2 D_i over earlier positions
    for i, l in enumerate(entries):
        k = start + i
        if l <= prev or (i == 0 and l < 2):
            failures.append(
                f"strictly increasing integers >= 2 violated at k={k} "
                f"(got {l} after {prev})"
            )
            break
        if l <= (1 << k):
            failures.append(f"l_k > 2^k violated at k={k} ({l} <= {1 << k})")
        if (l * l + l) * k + 1 >= l**4:
            failures.append(
                f"(l^2+l)k+1 < l^4 violated at k={k} "
                f"({(l * l + l) * k + 1} >= {l**4})"
            )
        if i >= 1:
            p = entries[i - 1]
            gap = l * l - ((p * p + p) * (k - 1) + 1)
            if not (gap >= 0 and (1 << gap) > 100):
                failures.append(
                    f"step separation 2^-((l_prev^2+l_prev)(k-1)+1) > "
                    f"100 * 2^-(l_k^2) violated at k={k} "
                    f"(gap exponent {gap} gives factor <= 100)"
                )
        own_log = l * l - (l * l + l) * k - 2
        if own_log >= 0:
            failures.append(
                f"depth factor D_k < 1 violated at k={k} (log2 D_k = {own_log})"
            )
        if i >= 1 and depth_log <= -l:
            failures.append(
                f"depth product D_1..D_(k-1) > 2^-l_k violated at k={k} "
                f"(log2 product {depth_log} <= {-l})"
            )
        prev = l
        depth_log += own_log
    return failures


def validate_scale_sequence(entries: Sequence[int], start: int = 1) -> SequenceReport:
    """Check the four admissibility conditions with exact integer tests.

    `start` is the index of the first entry (the conditions depend on the
    position k, so a truncated sequence validates against its true
    offsets).
    """
    if start < 1:
        raise ValueError("start index must be >= 1")
    entries = tuple(int(l) for l in entries)
    if not entries:
        return SequenceReport(entries, True, ())
    failures = _sequence_failures(entries, start)
    return SequenceReport(entries, not failures, tuple(failures))


def require_scale_sequence(entries: Sequence[int], start: int = 1) -> tuple[int, ...]:
    report = validate_scale_sequence(entries, start)
    if not report.ok:
        raise InvalidSequenceError(report.failures[0])
    return report.entries


def find_scale_sequence(
    depth: int,
    l_max: int = 64,
    accept: Optional[Callable[[tuple[int, ...]], bool]] = None,
) -> tuple[int, ...]:
    """Lexicographically smallest admissible sequence of the given depth.

    `accept`, if given, must approve every prefix (used by the measure
    search to bolt on extra conditions).
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")

    def extend(prefix: tuple[int, ...]) -> Optional[tuple[int, ...]]:
        if len(prefix) == depth:
            return prefix
        lo = (prefix[-1] + 1) if prefix else 2
        for l in range(lo, l_max + 1):
            cand = prefix + (l,)
            if not validate_scale_sequence(cand).ok:
                continue
            if accept is not None and not accept(cand):
                continue
            found = extend(cand)
            if found is not None:
                return found
        return None

    found = extend(())
    if found is None:
        raise InvalidSequenceError(
            f"no admissible sequence of depth {depth} with entries <= {l_max}"
        )
    return found


# ---------------------------------------------------------------------------
# composite expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticBase:
    """Diagonal quadratic a.x^2 + b.x + c with exact dyadic coefficients."""

    dim: int
    quad: tuple[DyadicRational, ...]
    lin: tuple[DyadicRational, ...]
    const: DyadicRational

    @classmethod
    def create(
        cls,
        dim: int,
        quad: Sequence[DyLike] = (),
        lin: Sequence[DyLike] = (),
        const: DyLike = 0,
    ) -> "QuadraticBase":
        if dim < 1:
            raise ValueError("dimension must be >= 1")

        def pad(v: Sequence[DyLike]) -> tuple[DyadicRational, ...]:
            vals = [_dy(c) for c in v]
            if len(vals) > dim:
                raise ValueError("more coefficients than dimensions")
            vals += [ZERO] * (dim - len(vals))
            return tuple(vals)

        return cls(dim, pad(quad), pad(lin), _dy(const))

    @property
    def is_zero(self) -> bool:
        return (
            all(q == ZERO for q in self.quad)
            and all(b == ZERO for b in self.lin)
            and self.const == ZERO
        )

    @property
    def certified_convex(self) -> bool:
        return all(q >= ZERO for q in self.quad)

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        out = np.full(X.shape[0], float(self.const))
        for i in range(self.dim):
            q, b = float(self.quad[i]), float(self.lin[i])
            if q:
                out += q * X[:, i] * X[:, i]
            if b:
                out += b * X[:, i]
        return out

    def evaluate_exact(self, point: Sequence[DyadicRational]) -> DyadicRational:
        acc = self.const
        for i in range(self.dim):
            acc = acc + self.quad[i] * point[i] * point[i] + self.lin[i] * point[i]
        return acc


@dataclass(frozen=True)
class SmoothedPart:
    inner: "ConvexExpr"
    lam: DyadicRational
    quad_exp: int


@dataclass(frozen=True)
class ConvexExpr:
    """Sum of a diagonal quadratic, staircase antiderivatives and boundary
    spikes in the first coordinate, and optionally a mollified inner
    expression.
    """

    dim: int
    base: QuadraticBase
    staircase_levels: tuple[int, ...] = ()
    spike_levels: tuple[int, ...] = ()
    smoothed: Optional[SmoothedPart] = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if self.base.dim != self.dim:
            raise ValueError("base dimension mismatch")
        for l in self.staircase_levels + self.spike_levels:
            StaircaseLevel(l)
        if self.smoothed is not None and self.smoothed.inner.dim != self.dim:
            raise ValueError("mollified inner expression dimension mismatch")

    # -- capabilities --

    @property
    def exact_capable(self) -> bool:
        """True when evaluate_exact works: no spikes (their kink abscissa
        l^-l is irrational in base 2) and no mollified part."""
        return not self.spike_levels and self.smoothed is None

    @property
    def has_closed_derivative(self) -> bool:
        return self.smoothed is None

    @property
    def certified_convex(self) -> bool:
        ok = self.base.certified_convex
        if self.smoothed is not None:
            ok = ok and self.smoothed.inner.certified_convex
        return ok

    # -- evaluation --

    def _check_points(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None] if self.dim == 1 else X[None, :]
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}")
        return X

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        """Float values at points X of shape (N, dim) (or (N,) when dim=1)."""
        X = self._check_points(X)
        out = self.base.evaluate(X)
        if self.staircase_levels:
            out = out + kernels.staircase_antiderivative_values(
                np.asarray(self.staircase_levels, dtype=np.int64), X[:, 0]
            )
        for l in self.spike_levels:
            out = out + boundary_spike_values(l, X[:, 0])
        if self.smoothed is not None:
            sp = self.smoothed
            out = out + mollify_values(
                sp.inner.evaluate, float(sp.lam), X, self.dim, sp.quad_exp
            )
        return out

    def evaluate_exact(self, point: Sequence[DyLike]) -> DyadicRational:
        if not self.exact_capable:
            raise ValueError(
                "exact evaluation unavailable: expression has boundary spikes "
                "or a mollified part (float-only pieces)"
            )
        pt = tuple(_dy(c) for c in point)
        if len(pt) != self.dim:
            raise ValueError(f"expected a point of dimension {self.dim}")
        acc = self.base.evaluate_exact(pt)
        for l in self.staircase_levels:
            acc = acc + staircase_antiderivative(l, pt[0])
        return acc

    def derivative_axis0(self, x: np.ndarray) -> np.ndarray:
        """Right derivative along the first coordinate (float path)."""
        if not self.has_closed_derivative:
            raise ValueError("no closed derivative through a mollified part")
        x = np.asarray(x, dtype=np.float64)
        out = 2.0 * float(self.base.quad[0]) * x + float(self.base.lin[0])
        if self.staircase_levels:
            out = out + kernels.staircase_values(
                np.asarray(self.staircase_levels, dtype=np.int64), x
            )
        for l in self.spike_levels:
            out = out + boundary_spike_slopes(l, x)
        return out

    # -- serialization --

    def to_dict(self) -> dict:
        d: dict = {
            "format": 1,
            "dim": self.dim,
            "base": {
                "quad": [str(q) for q in self.base.quad],
                "lin": [str(b) for b in self.base.lin],
                "const": str(self.base.const),
            },
            "staircase_levels": list(self.staircase_levels),
            "spike_levels": list(self.spike_levels),
        }
        if self.smoothed is not None:
            d["smoothed"] = {
                "lam": str(self.smoothed.lam),
                "quad_exp": self.smoothed.quad_exp,
                "inner": self.smoothed.inner.to_dict(),
            }
        else:
            d["smoothed"] = None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ConvexExpr":
        if d.get("format") != 1:
            raise ValueError(f"unsupported expression format: {d.get('format')!r}")
        dim = int(d["dim"])
        base = QuadraticBase(
            dim,
            tuple(parse_dyadic(s) for s in d["base"]["quad"]),
            tuple(parse_dyadic(s) for s in d["base"]["lin"]),
            parse_dyadic(d["base"]["const"]),
        )
        smoothed = None
        if d.get("smoothed") is not None:
            sp = d["smoothed"]
            smoothed = SmoothedPart(
                cls.from_dict(sp["inner"]), parse_dyadic(sp["lam"]), int(sp["quad_exp"])
            )
        return cls(
            dim,
            base,
            tuple(int(l) for l in d["staircase_levels"]),
            tuple(int(l) for l in d["spike_levels"]),
            smoothed,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ConvexExpr":
        return cls.from_dict(json.loads(text))


def compose(
    entries: Sequence[int],
    dim: int = 1,
    base: Optional[QuadraticBase] = None,
    validate: bool = True,
) -> ConvexExpr:
    """Sum of staircase antiderivatives over a scale sequence, plus a base.

    With an empty sequence this is just the base.  `validate=True` enforces
    sequence admissibility and raises InvalidSequenceError naming the first
    violated condition.
    """
    entries = tuple(int(l) for l in entries)
    if validate:
        require_scale_sequence(entries)
    if base is None:
        base = QuadraticBase.create(dim)
    return ConvexExpr(dim, base, staircase_levels=entries)


def with_spike(expr: ConvexExpr, level: int) -> ConvexExpr:
    return ConvexExpr(
        expr.dim,
        expr.base,
        expr.staircase_levels,
        expr.spike_levels + (int(level),),
        expr.smoothed,
    )


def mollify(expr: ConvexExpr, lam: DyLike, quad_exp: int = 7) -> ConvexExpr:
    """Mollified copy of `expr`.

    The argument is first pulled back by T(x) = lam + (1-2*lam)x so every
    probe point lands strictly inside (0,1)^dim, then averaged against the
    bump lattice at scale lam.  Convexity is preserved (each probe is a
    convex precomposition with an affine map).
    """
    lam = _dy(lam) if not isinstance(lam, float) else DyadicRational.from_float(lam)
    if not (ZERO < lam < DyadicRational(1, -1)):
        raise ValueError(f"mollification scale must satisfy 0 < lam < 1/2; got {lam}")
    if quad_exp < 2 or quad_exp > 10:
        raise ValueError("quadrature exponent must be in [2, 10]")
    return ConvexExpr(
        expr.dim,
        QuadraticBase.create(expr.dim),
        smoothed=SmoothedPart(expr, lam, int(quad_exp)),
    )


# ---------------------------------------------------------------------------
# mollification quadrature
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def quadrature_lattice(dim: int, quad_exp: int) -> tuple[np.ndarray, np.ndarray]:
    """Bump-weighted midpoint lattice on [-1,1]^dim.

    2^quad_exp midpoints per axis; weights proportional to
    exp(-1/(1-|u|^2)) on |u| < 1, normalized to sum to 1.  Returns
    (nodes (M, dim), weights (M,)) with zero-weight nodes dropped.
    """
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    n = 1 << quad_exp
    axis = -1.0 + (np.arange(n) + 0.5) * (2.0 / n)
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    rad2 = np.sum(nodes * nodes, axis=1)
    mask = rad2 < 1.0
    nodes = np.ascontiguousarray(nodes[mask])
    psi = np.exp(-1.0 / (1.0 - rad2[mask]))
    w = psi / psi.sum()
    w[np.argmax(w)] += 1.0 - w.sum()  # pin the sum to exactly 1.0
    return nodes, w


def mollify_values(
    inner: Callable[[np.ndarray], np.ndarray],
    lam: float,
    X: np.ndarray,
    dim: int,
    quad_exp: int = 7,
    chunk: int = 1 << 18,
) -> np.ndarray:
    """Quadrature mollification of `inner` at points X (shape (N, dim))."""
    if not (0.0 < lam < 0.5):
        raise ValueError(f"mollification scale must satisfy 0 < lam < 1/2; got {lam}")
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    nodes, w = quadrature_lattice(dim, quad_exp)
    T = lam + (1.0 - 2.0 * lam) * X
    out = np.empty(X.shape[0], dtype=np.float64)
    step = max(1, chunk // nodes.shape[0] + 1)
    for lo in range(0, X.shape[0], step):
        hi = min(lo + step, X.shape[0])
        probes = T[lo:hi, None, :] + lam * nodes[None, :, :]
        vals = inner(probes.reshape(-1, dim))
        vals = np.asarray(vals, dtype=np.float64)
        if not np.all(np.isfinite(vals)):
            raise ValueError("inner expression produced non-finite values")
        out[lo:hi] = vals.reshape(hi - lo, nodes.shape[0]) @ w
    return out


# ---------------------------------------------------------------------------
# convexity checking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvexityReport:
    ok: bool
    mode: str
    axis: int
    grid_exp: int
    violations: int
    first_index: Optional[int]
    first_point: Optional[float]
    min_second_diff: float

    def __str__(self) -> str:
        verdict = "convex" if self.ok else "NOT convex"
        msg = (
            f"{verdict} along axis {self.axis} at step 2^-{self.grid_exp} "
            f"({self.mode}); min second difference {self.min_second_diff:.3e}"
        )
        if not self.ok:
            msg += (
                f"; {self.violations} violations, first at index "
                f"{self.first_index} (x = {self.first_point})"
            )
        return msg


def second_difference_scan(
    values: Sequence, tol: float = 0.0
) -> tuple[int, Optional[int], float]:
    """Count second differences below -tol; return (count, first, minimum).

    Accepts float arrays or DyadicRational sequences (scanned exactly).
    """
    if len(values) >= 1 and isinstance(values[0], DyadicRational):
        count = 0
        first = None
        worst: Optional[DyadicRational] = None
        for i in range(1, len(values) - 1):
            d2 = values[i + 1] - values[i] - values[i] + values[i - 1]
            if worst is None or d2 < worst:
                worst = d2
            if d2 < ZERO:
                count += 1
                if first is None:
                    first = i
        return count, first, 0.0 if worst is None else worst.to_float()[0]
    arr = np.asarray(values, dtype=np.float64)
    d2 = np.diff(arr, 2)
    if d2.size == 0:
        return 0, None, 0.0
    bad = d2 < -tol
    count = int(bad.sum())
    first = int(np.argmax(bad)) + 1 if count else None
    return count, first, float(d2.min())


def convexity_check(
    expr: ConvexExpr,
    grid_exp: int,
    axis: int = 0,
    mode: str = "auto",
    anchor: Optional[Sequence[DyLike]] = None,
    tol: float = 0.0,
) -> ConvexityReport:
    """Second-difference convexity check along one axis at step 2^-grid_exp.

    mode 'exact' scans exact dyadic values (available when the expression
    is exact-capable), 'float' uses the kernel backend with tolerance
    `tol`, 'auto' picks exact when possible.  Other coordinates are pinned
    to `anchor` (default 1/2 everywhere); the expression pieces vary only
    along the first coordinate, so one line is representative per axis.
    """
    if axis < 0 or axis >= expr.dim:
        raise ValueError(f"axis {axis} out of range for dimension {expr.dim}")
    if grid_exp < 2 or grid_exp > 22:
        raise ValueError("grid exponent must be in [2, 22]")
    if mode == "auto":
        mode = "exact" if expr.exact_capable else "float"
    n_points = (1 << grid_exp) + 1
    if mode == "exact":
        if not expr.exact_capable:
            raise ValueError("exact mode unavailable for this expression")
        if anchor is None:
            anchor_pt = [DyadicRational(1, -1)] * expr.dim
        else:
            anchor_pt = [_dy(c) for c in anchor]
        vals = []
        pt = list(anchor_pt)
        for i in range(n_points):
            pt[axis] = DyadicRational(i, -grid_exp)
            vals.append(expr.evaluate_exact(pt))
        count, first, worst = second_difference_scan(vals)
    elif mode == "float":
        xs = np.arange(n_points, dtype=np.float64) * 2.0 ** (-grid_exp)
        if anchor is None:
            anchor_vals = [0.5] * expr.dim
        else:
            anchor_vals = [float(_dy(c)) for c in anchor]
        X = np.tile(np.asarray(anchor_vals), (n_points, 1))
        X[:, axis] = xs
        count, first, worst = second_difference_scan(expr.evaluate(X), tol=tol)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return ConvexityReport(
        ok=count == 0,
        mode=mode,
        axis=axis,
        grid_exp=grid_exp,
        violations=count,
        first_index=first,
        first_point=None if first is None else first * 2.0 ** (-grid_exp),
        min_second_diff=worst,
    )
