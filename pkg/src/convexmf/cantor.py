"""Nested dyadic interval hierarchies and the uniform mass they carry.

Each generation keeps, inside every surviving interval, one short interval
near the right end of each cell of the next staircase lattice.  Endpoints
stay exact dyadic rationals; counts stay symbolic (log2 integers), so
covering statistics and exact ball masses are available far below float
resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

from .constructions import require_scale_sequence
from .dyadic import ONE, ZERO, DyadicRational

__all__ = [
    "EmptyIntersectionError",
    "kept_width_exp",
    "GenerationInfo",
    "IntervalSet",
    "level_intervals",
    "intersect_to_depth",
    "CoveringReport",
    "covering_counts",
    "find_measure_sequence",
    "MassDistribution",
    "build_measure",
    "lebesgue",
    "LocalDimensionReport",
    "local_dimension",
]

HLike = Union[float, Fraction, int]

# materialized interval enumeration stops here; everything else is symbolic
MATERIALIZE_CAP = 1 << 24


class EmptyIntersectionError(ValueError):
    """A generation's kept intervals are too narrow to hold the next one."""


def _as_h(h: HLike) -> Fraction:
    hf = Fraction(h)
    if not (1 <= hf < 2):
        raise ValueError(f"h must lie in [1, 2); got {h}")
    return hf


def kept_width_exp(h: HLike, level: int, k: int) -> int:
    """Exponent e with kept width 2^-e for a level at generation index k.

    h = 1 deepens geometrically in k; 1 < h < 2 uses the dyadic ceiling of
    (level^2+level)/(h-1) so interval endpoints stay dyadic.
    """
    hf = _as_h(h)
    base = level * level + level
    if hf == 1:
        return k * base
    return math.ceil(Fraction(base) / (hf - 1))


@dataclass(frozen=True)
class GenerationInfo:
    index: int
    level: int
    cell_exp: int  # cells have width 2^-cell_exp
    width_exp: int  # kept width 2^-width_exp; interval length is half that
    log2_children: int  # per surviving parent interval
    log2_count: int  # total intervals this generation

    @property
    def delta_exp(self) -> int:
        """Interval length is 2^-delta_exp."""
        return self.width_exp + 1

    @property
    def slope(self) -> float:
        return self.log2_count / self.delta_exp


def _generations(
    h: Fraction, entries: Sequence[int], k_start: int
) -> tuple[list[GenerationInfo], Optional[int]]:
    gens: list[GenerationInfo] = []
    total = 0
    prev_delta: Optional[int] = None
    for i, level in enumerate(entries):
        k = k_start + i
        cell_exp = level * level
        width_exp = kept_width_exp(h, level, k)
        if width_exp <= cell_exp:
            # kept width would exceed its cell; parameters make no sense
            raise ValueError(
                f"generation {k}: kept width 2^-{width_exp} is not smaller "
                f"than the cell width 2^-{cell_exp}"
            )
        if prev_delta is None:
            log2_children = cell_exp
        else:
            log2_children = cell_exp - prev_delta
            if log2_children < 0:
                return gens, k
        total += log2_children
        gens.append(
            GenerationInfo(k, level, cell_exp, width_exp, log2_children, total)
        )
        prev_delta = width_exp + 1
    return gens, None


@dataclass(frozen=True)
class IntervalSet:
    """Materialized intervals of one generation depth, left to right.

    `empty_at` names the generation whose cells no longer fit inside the
    surviving intervals (in which case `intervals` is empty); materialized
    sets are bounded by the enumeration cap, deeper hierarchies stay
    symbolic (covering_counts).
    """

    h: Fraction
    entries: tuple[int, ...]
    k_start: int
    generation: int
    intervals: tuple[tuple[DyadicRational, DyadicRational], ...]
    empty_at: Optional[int] = None

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def endpoint_strings(self) -> list[list[str]]:
        return [[str(lo), str(hi)] for lo, hi in self.intervals]

    def __str__(self) -> str:
        if self.empty_at is not None:
            return (
                f"interval set empty at generation {self.empty_at} "
                f"(h = {self.h}, entries {self.entries})"
            )
        return (
            f"{len(self.intervals)} intervals at generation "
            f"{self.generation} (h = {self.h}, entries {self.entries})"
        )


def level_intervals(
    h: HLike, level: int, k: int = 1, limit: int = MATERIALIZE_CAP
) -> IntervalSet:
    """One generation's lattice on [0,1]: in each cell of width 2^-level^2
    the kept interval sits against the right end, length half the kept
    width."""
    hf = _as_h(h)
    if level < 2:
        raise ValueError("level must be >= 2")
    cell_exp = level * level
    width_exp = kept_width_exp(hf, level, k)
    if width_exp <= cell_exp:
        raise ValueError(
            f"kept width 2^-{width_exp} is not smaller than the cell "
            f"width 2^-{cell_exp}"
        )
    if (1 << cell_exp) > limit:
        raise ValueError(
            f"2^{cell_exp} intervals exceed the materialization cap {limit}; "
            "use covering_counts for symbolic statistics"
        )
    width = DyadicRational(1, -width_exp)
    half = DyadicRational(1, -(width_exp + 1))
    out = []
    for j in range(1 << cell_exp):
        lo = DyadicRational(j + 1, -cell_exp) - width
        out.append((lo, lo + half))
    return IntervalSet(hf, (level,), k, k, tuple(out))


def intersect_to_depth(
    h: HLike, entries: Sequence[int], k_start: int = 1, limit: int = MATERIALIZE_CAP
) -> IntervalSet:
    """Materialize the deepest generation of the nested hierarchy.

    An empty intersection is reported through `empty_at`, not raised;
    interval counts beyond `limit` are an error (the hierarchy is still
    available symbolically through covering_counts).
    """
    hf = _as_h(h)
    entries = require_scale_sequence(entries, start=k_start)
    if not entries:
        raise ValueError("at least one generation is required")
    gens, empty_at = _generations(hf, entries, k_start)
    last_k = k_start + len(entries) - 1
    if empty_at is not None:
        return IntervalSet(hf, entries, k_start, last_k, (), empty_at)
    if gens[-1].log2_count >= limit.bit_length():
        raise ValueError(
            f"2^{gens[-1].log2_count} intervals exceed the materialization "
            f"cap {limit}; use covering_counts for symbolic statistics"
        )

    out: list[tuple[DyadicRational, DyadicRational]] = []

    def walk(gi: int, left: DyadicRational) -> None:
        g = gens[gi]
        width = DyadicRational(1, -g.width_exp)
        half = DyadicRational(1, -g.delta_exp)
        for j in range(1 << g.log2_children):
            lo = left + DyadicRational(j + 1, -g.cell_exp) - width
            if gi == len(gens) - 1:
                out.append((lo, lo + half))
            else:
                walk(gi + 1, lo)

    walk(0, ZERO)
    return IntervalSet(hf, entries, k_start, last_k, tuple(out))


@dataclass(frozen=True)
class CoveringReport:
    h: Fraction
    entries: tuple[int, ...]
    k_start: int
    generations: tuple[GenerationInfo, ...]
    empty_at: Optional[int]

    @property
    def slopes(self) -> tuple[float, ...]:
        return tuple(g.slope for g in self.generations)

    @property
    def nondecreasing_slopes(self) -> bool:
        s = self.slopes
        return all(s[i] <= s[i + 1] for i in range(len(s) - 1))

    def __str__(self) -> str:
        lines = [
            f"covering counts for h = {self.h} over {self.entries} "
            f"(k_start {self.k_start})"
        ]
        for g in self.generations:
            lines.append(
                f"  gen {g.index}: level {g.level}, intervals 2^{g.log2_count} "
                f"of length 2^-{g.delta_exp}, slope {g.slope:.4f}"
            )
        if self.empty_at is not None:
            lines.append(f"  EMPTY at generation {self.empty_at}")
        return "\n".join(lines)


def covering_counts(
    h: HLike, entries: Sequence[int], k_start: int = 1
) -> CoveringReport:
    """Symbolic interval counts, lengths and log-log slopes per generation.

    Never materializes intervals; an impossible deeper generation is
    reported via `empty_at` instead of raising.
    """
    hf = _as_h(h)
    entries = require_scale_sequence(entries, start=k_start)
    gens, empty_at = _generations(hf, entries, k_start)
    return CoveringReport(hf, entries, k_start, tuple(gens), empty_at)


def find_measure_sequence(
    h: HLike, depth: int, l_max: int = 64, k_start: int = 1
) -> tuple[int, ...]:
    """Smallest admissible sequence whose hierarchy at h is nonempty with
    nondecreasing covering slopes (the slope condition only binds for h>1;
    at h=1 the target slope is 0 and the counts thin out by design)."""
    hf = _as_h(h)
    from .constructions import find_scale_sequence

    def accept(prefix: tuple[int, ...]) -> bool:
        try:
            gens, empty_at = _generations(hf, prefix, k_start)
        except ValueError:
            return False
        if empty_at is not None:
            return False
        if hf > 1:
            slopes = [g.slope for g in gens]
            if any(slopes[i] > slopes[i + 1] for i in range(len(slopes) - 1)):
                return False
        return True

    return find_scale_sequence(depth, l_max=l_max, accept=accept)


# ---------------------------------------------------------------------------
# the mass distribution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MassDistribution:
    """Uniform mass on the intersection set, times Lebesgue in extra axes.

    Mass 1 splits equally among each generation's intervals; inside a
    deepest-generation interval it spreads uniformly.  Ball masses use the
    sup norm, so extra axes contribute exact side-length factors.
    """

    h: Fraction
    entries: tuple[int, ...]
    k_start: int
    dim: int
    generations: tuple[GenerationInfo, ...]

    @property
    def depth(self) -> int:
        return len(self.generations)

    @property
    def deepest(self) -> GenerationInfo:
        if not self.generations:
            raise ValueError("uniform measure has no interval hierarchy")
        return self.generations[-1]

    def interval_count_log2(self) -> int:
        return self.deepest.log2_count

    # -- geometry --

    def support_point(self) -> DyadicRational:
        """Left endpoint of the leftmost deepest interval (in the support)."""
        left = ZERO
        for g in self.generations:
            left = left + DyadicRational(1, -g.cell_exp) - DyadicRational(
                1, -g.width_exp
            )
        return left

    def intervals(self, limit: int = MATERIALIZE_CAP) -> Iterator[
        tuple[DyadicRational, DyadicRational]
    ]:
        """Deepest-generation intervals, left to right, at most `limit`."""
        if not self.generations:
            if limit >= 1:
                yield (ZERO, ONE)
            return
        count = 0

        def walk(gi: int, left: DyadicRational) -> Iterator[
            tuple[DyadicRational, DyadicRational]
        ]:
            nonlocal count
            g = self.generations[gi]
            width = DyadicRational(1, -g.width_exp)
            half = DyadicRational(1, -g.delta_exp)
            for j in range(1 << g.log2_children):
                if count >= limit:
                    return
                lo = left + DyadicRational(j + 1, -g.cell_exp) - width
                if gi == len(self.generations) - 1:
                    count += 1
                    yield (lo, lo + half)
                else:
                    yield from walk(gi + 1, lo)

        yield from walk(0, ZERO)

    # -- exact ball masses --

    def _mass_on_axis(self, lo: DyadicRational, hi: DyadicRational) -> DyadicRational:
        if lo < ZERO:
            lo = ZERO
        if hi > ONE:
            hi = ONE
        if hi <= lo:
            return ZERO
        if not self.generations:  # no hierarchy: uniform on [0,1]
            return hi - lo
        return self._mass_in(0, ZERO, lo, hi)

    def _mass_in(
        self,
        gi: int,
        parent_left: DyadicRational,
        lo: DyadicRational,
        hi: DyadicRational,
    ) -> DyadicRational:
        """Mass of [lo, hi] within a surviving generation-(gi-1) interval."""
        g = self.generations[gi]
        width = DyadicRational(1, -g.width_exp)
        half_exp = g.delta_exp
        # child j occupies [parent_left + (j+1)c - w, ... + w/2], j >= 0
        # j fully inside iff lo <= left(j) and right(j) <= hi
        lo_rel = lo - parent_left
        hi_rel = hi - parent_left
        j_count = 1 << g.log2_children
        # child j is fully inside [lo, hi] iff
        #   (j+1)*cell >= lo_rel + w   and   (j+1)*cell <= hi_rel + w/2
        j_lo = _ceil_index(lo_rel + width, g.cell_exp) - 1
        j_hi = (hi_rel + DyadicRational(1, -half_exp)).floor_mul_pow2(g.cell_exp) - 1
        j_lo_c = max(j_lo, 0)
        j_hi_c = min(j_hi, j_count - 1)
        total = ZERO
        if j_hi_c >= j_lo_c:
            total = DyadicRational(j_hi_c - j_lo_c + 1, -g.log2_count)
        # partial overlaps can only involve the kept intervals just outside
        # the fully-contained range
        for j in (j_lo_c - 1, j_hi_c + 1) if j_hi_c >= j_lo_c else range(
            max(0, j_lo - 2), min(j_count, j_hi + 3)
        ):
            if j < 0 or j >= j_count:
                continue
            left = parent_left + DyadicRational(j + 1, -g.cell_exp) - width
            right = left + DyadicRational(1, -half_exp)
            a = lo if lo > left else left
            b = hi if hi < right else right
            if b <= a:
                continue
            if a == left and b == right:
                continue  # already counted as full
            if gi == len(self.generations) - 1:
                # uniform inside the deepest interval
                frac = (b - a).scale(half_exp)
                total = total + DyadicRational(1, -g.log2_count) * frac
            else:
                total = total + self._mass_in(gi + 1, left, a, b)
        return total

    def ball_mass(self, point: Sequence[DyadicRational], r: DyadicRational) -> DyadicRational:
        """Exact mass of the closed sup-norm ball around `point`."""
        if isinstance(point, DyadicRational):
            point = (point,)
        point = tuple(point)
        if len(point) != self.dim:
            raise ValueError(f"expected a point of dimension {self.dim}")
        if r <= ZERO:
            raise ValueError("ball radius must be positive")
        mass = self._mass_on_axis(point[0] - r, point[0] + r)
        for i in range(1, self.dim):
            lo = point[i] - r
            hi = point[i] + r
            if lo < ZERO:
                lo = ZERO
            if hi > ONE:
                hi = ONE
            if hi <= lo:
                return ZERO
            mass = mass * (hi - lo)
        return mass


def _ceil_index(x: DyadicRational, k: int) -> int:
    """ceil(x * 2^k) for exact dyadic x."""
    neg = (-x).floor_mul_pow2(k)
    return -neg


def lebesgue(dim: int = 1) -> MassDistribution:
    """Uniform mass on [0,1]^dim (the no-hierarchy reference measure)."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    return MassDistribution(Fraction(1), (), 1, dim, ())


def build_measure(
    h: HLike, entries: Sequence[int], k_start: int = 1, dim: int = 1
) -> MassDistribution:
    """Validated mass distribution for the given parameters.

    Raises EmptyIntersectionError when some generation cannot fit inside
    the previous one (its cells are wider than the surviving intervals).
    """
    hf = _as_h(h)
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    entries = require_scale_sequence(entries, start=k_start)
    if not entries:
        raise ValueError("at least one generation is required")
    gens, empty_at = _generations(hf, entries, k_start)
    if empty_at is not None:
        prev = gens[-1] if gens else None
        detail = (
            f"generation {empty_at} cells (width 2^-{entries[empty_at - k_start] ** 2})"
            f" are wider than the surviving intervals"
            + (f" (length 2^-{prev.delta_exp})" if prev else "")
        )
        raise EmptyIntersectionError(f"intersection is empty: {detail}")
    return MassDistribution(hf, entries, k_start, dim, tuple(gens))


@dataclass(frozen=True)
class LocalDimensionReport:
    point: tuple[str, ...]
    radius_exps: tuple[int, ...]
    log2_masses: tuple[float, ...]
    slope: float

    def __str__(self) -> str:
        return (
            f"local dimension {self.slope:.4f} over radii "
            f"2^-{self.radius_exps[0]}..2^-{self.radius_exps[-1]}"
        )


def local_dimension(
    md: MassDistribution,
    radius_exps: Sequence[int],
    point: Optional[Sequence[DyadicRational]] = None,
) -> LocalDimensionReport:
    """Least-squares slope of log2 ball mass against log2 radius.

    Radii 2^-q must stay within the resolved range: no smaller than the
    deepest interval length, no larger than the first generation's cell.
    """
    radius_exps = tuple(int(q) for q in radius_exps)
    if len(radius_exps) < 2:
        raise ValueError("need at least two radii")
    if any(q < 1 for q in radius_exps):
        raise ValueError("radii 2^-q need q >= 1 to fit inside [0,1]")
    if md.generations:  # uniform measure resolves at every radius
        g0 = md.generations[0]
        deepest = md.deepest
        for q in radius_exps:
            if q > deepest.delta_exp:
                raise ValueError(
                    f"radius 2^-{q} is below the deepest resolved scale "
                    f"2^-{deepest.delta_exp}"
                )
            if q < g0.cell_exp:
                raise ValueError(
                    f"radius 2^-{q} exceeds the first generation cell "
                    f"2^-{g0.cell_exp}"
                )
    if point is None:
        axis_pt = (
            md.support_point() if md.generations else DyadicRational(1, -1)
        )
        point = (axis_pt,) + (DyadicRational(1, -1),) * (md.dim - 1)
    point = tuple(point)
    logs: list[float] = []
    for q in radius_exps:
        m = md.ball_mass(point, DyadicRational(1, -q))
        if m == ZERO:
            raise ValueError(f"no mass at radius 2^-{q}; point outside support")
        logs.append(math.log2(m.mantissa) + m.exponent)
    xs = [-float(q) for q in radius_exps]
    xm = sum(xs) / len(xs)
    ym = sum(logs) / len(logs)
    var = sum((x - xm) ** 2 for x in xs)
    slope = sum((x - xm) * (y - ym) for x, y in zip(xs, logs)) / var
    return LocalDimensionReport(
        point=tuple(str(c) for c in point),
        radius_exps=radius_exps,
        log2_masses=tuple(logs),
        slope=slope,
    )
