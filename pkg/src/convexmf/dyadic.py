"""Exact arithmetic on dyadic rationals m * 2**e.

A dyadic rational is stored as an odd integer mantissa (or zero) and an
integer exponent, so every value has exactly one representation.  Addition,
subtraction and multiplication are closed and exact; division is only
available by powers of two (`scale`).  Exponents are bounded: leaving the
supported range raises ExponentOverflowError instead of wrapping.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

__all__ = [
    "DyadicRational",
    "ExponentOverflowError",
    "parse_dyadic",
    "ZERO",
    "ONE",
    "HALF",
]

# Exponent magnitude limit: scales beyond 2^(+-2^60) are out of scope.
_EXP_LIMIT = 1 << 60
# Alignment guard: adding values whose exponents differ by more than this
# would allocate gigabit integers; treat as overflow rather than thrash.
_SHIFT_LIMIT = 1 << 28

_PARSE_RE = re.compile(r"^\s*(-?\d+)\s*\*\s*2\^(-?\d+)\s*$")


class ExponentOverflowError(OverflowError):
    """Raised when a result's exponent leaves the supported range."""


def _check_exp(e: int) -> int:
    if abs(e) > _EXP_LIMIT:
        raise ExponentOverflowError(f"exponent {e} outside supported range")
    return e


class DyadicRational:
    """An exact dyadic rational m * 2**e with odd (or zero) mantissa."""

    __slots__ = ("mantissa", "exponent")

    mantissa: int
    exponent: int

    def __init__(self, mantissa: int, exponent: int = 0) -> None:
        if not isinstance(mantissa, int) or not isinstance(exponent, int):
            raise TypeError("mantissa and exponent must be int")
        if mantissa == 0:
            object.__setattr__(self, "mantissa", 0)
            object.__setattr__(self, "exponent", 0)
            return
        # strip trailing zero bits so the representation is canonical
        tz = (mantissa & -mantissa).bit_length() - 1
        object.__setattr__(self, "mantissa", mantissa >> tz)
        object.__setattr__(self, "exponent", _check_exp(exponent + tz))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("DyadicRational is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def from_int(cls, n: int) -> "DyadicRational":
        return cls(n, 0)

    @classmethod
    def from_float(cls, x: float) -> "DyadicRational":
        if not math.isfinite(x):
            raise ValueError(f"cannot represent {x!r} as a dyadic rational")
        num, den = x.as_integer_ratio()
        return cls(num, -(den.bit_length() - 1))

    @classmethod
    def from_fraction(cls, q: Fraction) -> "DyadicRational":
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} has a non power-of-two denominator")
        return cls(q.numerator, -(den.bit_length() - 1))

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "DyadicValue") -> "DyadicRational":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self, other
        if a.mantissa == 0:
            return b
        if b.mantissa == 0:
            return a
        if a.exponent < b.exponent:
            a, b = b, a
        shift = a.exponent - b.exponent
        if shift > _SHIFT_LIMIT:
            raise ExponentOverflowError(
                f"exponent gap {shift} exceeds supported alignment width"
            )
        return DyadicRational((a.mantissa << shift) + b.mantissa, b.exponent)

    __radd__ = __add__

    def __neg__(self) -> "DyadicRational":
        return DyadicRational(-self.mantissa, self.exponent)

    def __sub__(self, other: "DyadicValue") -> "DyadicRational":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: "DyadicValue") -> "DyadicRational":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: "DyadicValue") -> "DyadicRational":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.mantissa == 0 or other.mantissa == 0:
            return ZERO
        return DyadicRational(
            self.mantissa * other.mantissa, self.exponent + other.exponent
        )

    __rmul__ = __mul__

    def scale(self, k: int) -> "DyadicRational":
        """Return self * 2**k (the only division dyadics support)."""
        if self.mantissa == 0:
            return ZERO
        return DyadicRational(self.mantissa, _check_exp(self.exponent + k))

    def __abs__(self) -> "DyadicRational":
        return DyadicRational(abs(self.mantissa), self.exponent)

    # -- comparisons ---------------------------------------------------

    def _cmp(self, other: "DyadicRational") -> int:
        sa = (self.mantissa > 0) - (self.mantissa < 0)
        sb = (other.mantissa > 0) - (other.mantissa < 0)
        if sa != sb:
            return -1 if sa < sb else 1
        if sa == 0:
            return 0
        # same sign: compare magnitude orders before aligning mantissas
        oa = self.exponent + self.mantissa.bit_length()
        ob = other.exponent + other.mantissa.bit_length()
        if oa != ob:
            return sa if oa > ob else -sa
        shift = self.exponent - other.exponent
        ma, mb = abs(self.mantissa), abs(other.mantissa)
        if shift >= 0:
            ma <<= shift
        else:
            mb <<= -shift
        if ma == mb:
            return 0
        return sa if ma > mb else -sa

    def __eq__(self, other: object) -> bool:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.mantissa == o.mantissa and self.exponent == o.exponent

    def __lt__(self, other: "DyadicValue") -> bool:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._cmp(o) < 0

    def __le__(self, other: "DyadicValue") -> bool:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._cmp(o) <= 0

    def __gt__(self, other: "DyadicValue") -> bool:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._cmp(o) > 0

    def __ge__(self, other: "DyadicValue") -> bool:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._cmp(o) >= 0

    def __hash__(self) -> int:
        return hash((self.mantissa, self.exponent))

    def __bool__(self) -> bool:
        return self.mantissa != 0

    @property
    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    # -- conversions ---------------------------------------------------

    def floor_mul_pow2(self, k: int) -> int:
        """floor(self * 2**k) as a plain int."""
        e = self.exponent + k
        if e >= 0:
            return self.mantissa << e
        return self.mantissa >> -e

    def as_integer_ratio(self) -> tuple[int, int]:
        if self.exponent >= 0:
            return (self.mantissa << self.exponent, 1)
        return (self.mantissa, 1 << -self.exponent)

    def as_fraction(self) -> Fraction:
        num, den = self.as_integer_ratio()
        return Fraction(num, den)

    def to_float(self) -> tuple[float, bool]:
        """Nearest double plus an exactness flag.

        Values beyond the double range map to signed infinity or zero with
        the flag False.
        """
        if self.mantissa == 0:
            return (0.0, True)
        order = self.exponent + self.mantissa.bit_length()
        if order > 1100:
            return (math.inf if self.mantissa > 0 else -math.inf, False)
        if order < -1120:
            return (0.0 if self.mantissa > 0 else -0.0, False)
        if self.exponent >= 0:
            f = float(self.mantissa << self.exponent)
        else:
            f = self.mantissa / (1 << -self.exponent)
        if not math.isfinite(f):
            return (math.inf if self.mantissa > 0 else -math.inf, False)
        exact = abs(self.mantissa).bit_length() <= 53 and f != 0.0
        if exact:
            # round-trip confirms no rounding happened (ldexp range effects)
            num, den = f.as_integer_ratio()
            exact = (num, -(den.bit_length() - 1)) == (
                self.mantissa,
                self.exponent,
            )
        return (f, exact)

    def __float__(self) -> float:
        return self.to_float()[0]

    def __int__(self) -> int:
        return self.floor_mul_pow2(0) if self.mantissa >= 0 else -(
            (-self).floor_mul_pow2(0)
        )

    # -- text form -----------------------------------------------------

    def __str__(self) -> str:
        return f"{self.mantissa}*2^{self.exponent}"

    def __repr__(self) -> str:
        return f"DyadicRational({self.mantissa}, {self.exponent})"


DyadicValue = Union[DyadicRational, int]


def _coerce(x: object):
    if isinstance(x, DyadicRational):
        return x
    if isinstance(x, int):
        return DyadicRational(x, 0)
    return NotImplemented


def parse_dyadic(text: str) -> DyadicRational:
    """Parse 'm*2^e' (or a bare integer) into a DyadicRational."""
    m = _PARSE_RE.match(text)
    if m:
        return DyadicRational(int(m.group(1)), int(m.group(2)))
    stripped = text.strip()
    if re.fullmatch(r"-?\d+", stripped):
        return DyadicRational(int(stripped), 0)
    raise ValueError(f"not a dyadic literal: {text!r}")


ZERO = DyadicRational(0, 0)
ONE = DyadicRational(1, 0)
HALF = DyadicRational(1, -1)
