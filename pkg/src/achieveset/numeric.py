"""Exact rational scalars and closed-interval enclosures.

Rationals are :class:`fractions.Fraction`; nothing in the core ever touches
floating point.  :class:`Interval` is a closed interval with rational
endpoints, used for tail enclosures and hull pieces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class Refusal(RuntimeError):
    """An operation's hypothesis is not certified, so it declines to answer."""


def Q(value: RationalLike) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Accepts ints, Fractions and strings of the form ``"p/q"`` or ``"p"``.
    Floats are rejected: they would smuggle rounding into the core.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise DomainError(f"not an exact rational literal: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def fmt(x: Fraction) -> str:
    """Serialize as ``p/q`` (always with a denominator, never a decimal point)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def decimal_str(x: Fraction, digits: int) -> str:
    """Truncated decimal expansion of ``x`` with ``digits`` fractional digits.

    Computed with integer arithmetic; the trailing ``~`` marks the value as
    an approximation of the exact rational.
    """
    x = Fraction(x)
    sign = "-" if x < 0 else ""
    x = abs(x)
    scaled = x.numerator * 10**digits // x.denominator
    whole, frac = divmod(scaled, 10**digits)
    if digits == 0:
        return f"{sign}{whole}~"
    return f"{sign}{whole}.{frac:0{digits}d}~"


@dataclass(frozen=True, order=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Q(self.lo))
        object.__setattr__(self, "hi", Q(self.hi))
        if self.lo > self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: RationalLike) -> "Interval":
        x = Q(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __add__(self, other: "Interval | RationalLike") -> "Interval":
        if isinstance(other, Interval):
            return Interval(self.lo + other.lo, self.hi + other.hi)
        other = Q(other)
        return Interval(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other: "Interval | RationalLike") -> "Interval":
        if isinstance(other, Interval):
            return self + (-other)
        return self + (-Q(other))

    def __rsub__(self, other: RationalLike) -> "Interval":
        return (-self) + other

    def scale(self, c: RationalLike) -> "Interval":
        c = Q(c)
        a, b = self.lo * c, self.hi * c
        return Interval(min(a, b), max(a, b))

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def to_pair(self) -> list[str]:
        return [fmt(self.lo), fmt(self.hi)]

    def __str__(self) -> str:
        if self.is_point:
            return fmt(self.lo)
        return f"[{fmt(self.lo)}, {fmt(self.hi)}]"


def geometric_tail(ratio: RationalLike, scale: RationalLike, k: int) -> Fraction:
    """Exact value of ``sum_{n>k} scale * ratio**n`` for ``0 < ratio < 1``."""
    ratio, scale = Q(ratio), Q(scale)
    if not 0 < ratio < 1:
        raise DomainError(f"ratio must lie in (0, 1), got {ratio}")
    if k < 0:
        raise DomainError("k must be non-negative")
    return scale * ratio ** (k + 1) / (1 - ratio)


def interval_hausdorff_gap(a: Interval, b: Interval) -> Fraction:
    return max(abs(a.lo - b.lo), abs(a.hi - b.hi))


def ln2_enclosure(bits: int = 128) -> Interval:
    """Rational enclosure of ln 2 of width below ``2**-bits``.

    Uses ln 2 = sum_k 1/(k 2^k); the tail after K terms is at most 1/((K+1) 2^K).
    """
    total = Fraction(0)
    k = 0
    while True:
        k += 1
        total += Fraction(1, k * 2**k)
        tail = Fraction(1, (k + 1) * 2**k)
        if tail < Fraction(1, 2**bits):
            return Interval(total, total + tail)
