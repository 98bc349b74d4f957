"""Certified real and complex enclosures.

Two flavours are used throughout the package:

* :class:`RatInterval` has exact :class:`~fractions.Fraction` endpoints and
  comes out of exact root isolation.
* :class:`ComplexInterval` is a rectangle of ``mpmath.iv`` intervals, used
  where transcendental functions (``cos``, ``sin``, ``log``) are unavoidable.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from mpmath import iv, mpf

__all__ = ["RatInterval", "ComplexInterval", "PrecisionExhausted", "to_iv", "ivprec"]

DEFAULT_PRECISION = 64
MAX_PRECISION = 4096


class PrecisionExhausted(ArithmeticError):
    """Raised when a certified decision is still open at the precision cap."""


@contextmanager
def ivprec(bits: int):
    """Temporarily set the working precision of ``mpmath.iv``."""
    old = iv.prec
    iv.prec = max(bits, old)
    try:
        yield
    finally:
        iv.prec = old


def to_iv(q) -> "iv.mpf":
    """Outward-rounded enclosure of a rational at the current ``iv`` precision."""
    q = Fraction(q)
    if q.denominator == 1:
        return iv.mpf(q.numerator) if abs(q.numerator) < (1 << 52) else iv.mpf(str(q.numerator))
    return iv.mpf(str(q.numerator)) / iv.mpf(str(q.denominator))


def _sqrt_floor(q: Fraction, bits: int) -> Fraction:
    scale = 1 << (2 * bits)
    return Fraction(isqrt(q.numerator * scale // q.denominator), 1 << bits)


@dataclass(frozen=True)
class RatInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, q) -> "RatInterval":
        q = Fraction(q)
        return cls(q, q)

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __float__(self) -> float:
        return float(self.mid)

    def __contains__(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def overlaps(self, other: "RatInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def square(self) -> "RatInterval":
        a, b = self.lo * self.lo, self.hi * self.hi
        if self.lo <= 0 <= self.hi:
            return RatInterval(Fraction(0), max(a, b))
        return RatInterval(min(a, b), max(a, b))

    def __mul__(self, other: "RatInterval") -> "RatInterval":
        ps = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        return RatInterval(min(ps), max(ps))

    def __pow__(self, e: int) -> "RatInterval":
        out = RatInterval.point(1)
        for _ in range(e):
            out = out * self
        return out

    def sqrt(self, bits: int = 80) -> "RatInterval":
        """Outward rational enclosure of the square root (requires ``lo >= 0``)."""
        if self.lo < 0:
            raise ValueError("square root of an interval reaching below zero")
        lo = _sqrt_floor(self.lo, bits)
        hi = _sqrt_floor(self.hi, bits)
        if hi * hi < self.hi:
            hi += Fraction(1, 1 << bits)
        return RatInterval(lo, hi)

    def to_json(self) -> dict:
        return {"lo": f"{self.lo.numerator}/{self.lo.denominator}",
                "hi": f"{self.hi.numerator}/{self.hi.denominator}",
                "approx": float(self.mid)}

    def __repr__(self) -> str:
        return f"RatInterval(~{float(self.mid):.12g} ± {float(self.width) / 2:.2e})"


@dataclass(frozen=True)
class ComplexInterval:
    """Axis-aligned rectangle ``re + i*im`` with ``mpmath.iv`` sides."""

    re: object
    im: object

    @classmethod
    def exact(cls, z: complex | int) -> "ComplexInterval":
        z = complex(z)
        return cls(iv.mpf(z.real), iv.mpf(z.imag))

    def __add__(self, other: "ComplexInterval") -> "ComplexInterval":
        return ComplexInterval(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "ComplexInterval") -> "ComplexInterval":
        return ComplexInterval(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "ComplexInterval") -> "ComplexInterval":
        if not isinstance(other, ComplexInterval):
            other = ComplexInterval.exact(other)
        return ComplexInterval(self.re * other.re - self.im * other.im,
                               self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def conjugate(self) -> "ComplexInterval":
        return ComplexInterval(self.re, -self.im)

    def abs2(self):
        """``|z|**2`` as an ``iv`` interval."""
        return self.re * self.re + self.im * self.im

    @property
    def mid(self) -> complex:
        return complex(float(self.re.mid), float(self.im.mid))

    @property
    def radius(self) -> float:
        """Upper bound on the distance from :attr:`mid` to any enclosed point."""
        dr = float(mpf(self.re.delta) / 2)
        di = float(mpf(self.im.delta) / 2)
        return (dr * dr + di * di) ** 0.5 * (1 + 1e-12) + 5e-324

    def __contains__(self, z) -> bool:
        z = complex(z)
        return z.real in self.re and z.imag in self.im

    def to_json(self) -> dict:
        m = self.mid
        return {"re": m.real, "im": m.imag, "radius": self.radius}

    def __repr__(self) -> str:
        m = self.mid
        return f"ComplexInterval({m.real:.12g}{m.imag:+.12g}j ± {self.radius:.1e})"
