"""Rational points on the curves ``y^2 = x^3 + a2 x^2 + a4 x + a6`` and their heights.

Three models are supported: Legendre ``y^2 = x(x-1)(x-lambda)``, the
``j = 1728`` curve ``y^2 = x^3 - x`` and the ``j = 0`` curve ``y^2 = x^3 - 1``.

Canonical heights are computed by a telescoped doubling series.  Writing
``x(2^m P) = N_m / D_m`` in lowest terms on an integral model,

    h(2^(m+1) P) - 4 h(2^m P) = log max(|f(x_m)|, |g(x_m)|) - 4 log max(|x_m|, 1) - log g_m

where ``x(2P) = f(x)/g(x)`` is the duplication formula and ``g_m`` is the
cancellation in lowest terms.  ``g_m`` divides the resultant ``R`` of the
two doubling forms, so the exact numerators only need to be tracked modulo
a power of ``R``; the floating part only ever sees ``x_m`` itself.  The
series equals ``h(2^M P) / 4^M`` exactly, without the doubly exponential
coordinate growth.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import NamedTuple

import mpmath

__all__ = [
    "CurveSpec", "CurvePoint", "HeightEstimate", "point_arith", "naive_height",
    "canonical_height", "canonical_height_by_doubling", "nt_pairing", "is_torsion",
    "DEFAULT_CURVE",
]

MAZUR_BOUND = 12


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class CurveSpec:
    model: str
    lam: Fraction | None = None

    def __post_init__(self):
        if self.model not in ("legendre", "quartic", "sextic"):
            raise ValueError(f"unknown curve model {self.model!r}")
        if self.model == "legendre":
            if self.lam is None:
                raise ValueError("legendre model needs lambda")
            lam = Fraction(self.lam)
            if lam in (0, 1):
                raise ValueError(f"lambda must avoid 0 and 1, got {lam}")
            object.__setattr__(self, "lam", lam)
        elif self.lam is not None:
            raise ValueError(f"{self.model} model takes no lambda")
        if self.discriminant == 0:
            raise ValueError("singular curve")

    @classmethod
    def legendre(cls, lam) -> "CurveSpec":
        return cls("legendre", Fraction(lam))

    @classmethod
    def quartic(cls) -> "CurveSpec":
        return cls("quartic")

    @classmethod
    def sextic(cls) -> "CurveSpec":
        return cls("sextic")

    @property
    def a_invariants(self) -> tuple[Fraction, Fraction, Fraction]:
        if self.model == "legendre":
            return -(1 + self.lam), self.lam, Fraction(0)
        if self.model == "quartic":
            return Fraction(0), Fraction(-1), Fraction(0)
        return Fraction(0), Fraction(0), Fraction(-1)

    @property
    def b_invariants(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        a2, a4, a6 = self.a_invariants
        return 4 * a2, 2 * a4, 4 * a6, 4 * a2 * a6 - a4 * a4

    @property
    def discriminant(self) -> Fraction:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def j_invariant(self) -> Fraction:
        b2, b4, _, _ = self.b_invariants
        c4 = b2 * b2 - 24 * b4
        return c4 ** 3 / self.discriminant

    def rhs(self, x: Fraction) -> Fraction:
        a2, a4, a6 = self.a_invariants
        return ((x + a2) * x + a4) * x + a6

    def contains(self, x, y) -> bool:
        return Fraction(y) ** 2 == self.rhs(Fraction(x))

    def integral_scale(self) -> int:
        """Least ``u`` with ``u^2 a2, u^4 a4, u^6 a6`` integral."""
        u = 1
        for a in self.a_invariants:
            u = _lcm(u, a.denominator)
        return u

    def point(self, x, y) -> "CurvePoint":
        return CurvePoint(self, Fraction(x), Fraction(y))

    def infinity(self) -> "CurvePoint":
        return CurvePoint(self, None, None)

    def two_torsion(self) -> list["CurvePoint"]:
        """Rational 2-torsion points (rational roots of the cubic)."""
        a2, a4, a6 = self.a_invariants
        u = self.integral_scale()
        # rational roots of the cubic are u^-2 times integer divisors of u^6 a6 (or 0)
        c0 = int(a6 * u ** 6)
        cands = {Fraction(0)}
        if c0:
            for d in range(1, abs(c0) + 1):
                if c0 % d == 0:
                    cands |= {Fraction(d, u * u), Fraction(-d, u * u)}
        else:
            # x | cubic: the rest is a quadratic
            disc = a2 * a2 - 4 * a4
            if disc >= 0:
                r = _rational_sqrt(disc)
                if r is not None:
                    cands |= {(-a2 + r) / 2, (-a2 - r) / 2}
        return sorted((self.point(x, 0) for x in cands if self.rhs(x) == 0), key=lambda p: p.x)

    def label(self) -> str:
        return f"legendre({self.lam})" if self.model == "legendre" else self.model


def _rational_sqrt(q: Fraction) -> Fraction | None:
    from math import isqrt
    n, d = q.numerator, q.denominator
    if n < 0:
        return None
    rn, rd = isqrt(n), isqrt(d)
    return Fraction(rn, rd) if rn * rn == n and rd * rd == d else None


@dataclass(frozen=True)
class CurvePoint:
    curve: CurveSpec
    x: Fraction | None
    y: Fraction | None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise ValueError("both coordinates or neither")
        if self.x is not None:
            object.__setattr__(self, "x", Fraction(self.x))
            object.__setattr__(self, "y", Fraction(self.y))
            if not self.curve.contains(self.x, self.y):
                raise ValueError(f"({self.x}, {self.y}) is not on {self.curve.label()}")

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __add__(self, other: "CurvePoint") -> "CurvePoint":
        return point_arith(self, other, "add")

    def __neg__(self) -> "CurvePoint":
        return point_arith(self, None, "neg")

    def __sub__(self, other: "CurvePoint") -> "CurvePoint":
        return self + (-other)

    def __mul__(self, m: int) -> "CurvePoint":
        return point_arith(self, m, "mul")

    __rmul__ = __mul__

    def double(self) -> "CurvePoint":
        return point_arith(self, None, "double")

    def to_json(self):
        if self.is_infinity:
            return "O"
        return [_qstr(self.x), _qstr(self.y)]

    def __repr__(self) -> str:
        return "O" if self.is_infinity else f"({self.x}, {self.y})"


def _qstr(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _add(p: CurvePoint, q: CurvePoint) -> CurvePoint:
    if p.curve != q.curve:
        raise ValueError("points lie on different curves")
    if p.is_infinity:
        return q
    if q.is_infinity:
        return p
    a2, a4, _ = p.curve.a_invariants
    if p.x == q.x:
        if p.y != q.y or p.y == 0:
            return p.curve.infinity()
        slope = (3 * p.x * p.x + 2 * a2 * p.x + a4) / (2 * p.y)
    else:
        slope = (q.y - p.y) / (q.x - p.x)
    x3 = slope * slope - a2 - p.x - q.x
    y3 = slope * (p.x - x3) - p.y
    return CurvePoint(p.curve, x3, y3)


def _neg(p: CurvePoint) -> CurvePoint:
    return p if p.is_infinity else CurvePoint(p.curve, p.x, -p.y)


def _mul(p: CurvePoint, m: int) -> CurvePoint:
    if m < 0:
        return _mul(_neg(p), -m)
    result, base = p.curve.infinity(), p
    while m:
        if m & 1:
            result = _add(result, base)
        base = _add(base, base)
        m >>= 1
    return result


def point_arith(p: CurvePoint, q, op: str = "add") -> CurvePoint:
    """Group law: ``op`` is ``add``, ``sub``, ``neg``, ``double`` or ``mul`` (``q`` an int)."""
    if op == "add":
        return _add(p, q)
    if op == "sub":
        return _add(p, _neg(q))
    if op == "neg":
        return _neg(p)
    if op == "double":
        return _add(p, p)
    if op == "mul":
        return _mul(p, int(q))
    raise ValueError(f"unknown operation {op!r}")


def naive_height(p: CurvePoint) -> float:
    """``log max(|num|, |den|)`` of the x-coordinate; 0 at infinity."""
    if p.is_infinity:
        return 0.0
    return float(mpmath.log(max(abs(p.x.numerator), p.x.denominator)))


def _integral_on_model(p: CurvePoint, u: int) -> bool:
    return (p.x * u * u).denominator == 1 and (p.y * u ** 3).denominator == 1


def is_torsion(p: CurvePoint) -> bool:
    """Exact test: some multiple ``m P`` with ``m <= 12`` is the identity.

    On the integral model every multiple of a torsion point has integer
    coordinates (Nagell-Lutz), so the first non-integral multiple settles
    the question before coordinates grow.
    """
    u = p.curve.integral_scale()
    q = p
    for _ in range(MAZUR_BOUND):
        if q.is_infinity:
            return True
        if not _integral_on_model(q, u):
            return False
        q = _add(q, p)
    return q.is_infinity


class HeightEstimate(NamedTuple):
    value: float
    converged: bool
    steps: int

    def __float__(self) -> float:
        return float(self.value)


def _resultant(f: list[int], g: list[int]) -> int:
    """Resultant of two binary forms given by descending coefficient lists."""
    from .linalg import IntMat, det
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + f + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + g + [0] * (size - n - 1 - i))
    return det(IntMat.of(rows))


def _integral_b(curve: CurveSpec) -> tuple[int, tuple[int, int, int, int]]:
    u = curve.integral_scale()
    a2, a4, a6 = curve.a_invariants
    A2, A4, A6 = int(a2 * u ** 2), int(a4 * u ** 4), int(a6 * u ** 6)
    return u, (4 * A2, 2 * A4, 4 * A6, 4 * A2 * A6 - A4 * A4)


def canonical_height(p: CurvePoint, tol: float = 1e-12, max_steps: int = 60) -> HeightEstimate:
    """Néron–Tate height ``lim h(2^m P) / 4^m`` (normalised as the naive height of x).

    Torsion points are detected exactly and return 0.  If the series has
    not met ``tol`` after ``max_steps`` doublings the estimate is flagged
    as unconverged.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if p.is_infinity or is_torsion(p):
        return HeightEstimate(0.0, True, 0)
    u, (b2, b4, b6, b8) = _integral_b(p.curve)
    xq = p.x * u * u
    n0, d0 = xq.numerator, xq.denominator
    F = [1, 0, -b4, -2 * b6, -b8]
    G = [0, 4, b2, 2 * b4, b6]
    res = abs(_resultant(F, G))
    if res == 0:
        raise ArithmeticError("doubling forms share a factor: singular model")
    prec = 80 + 3 * max_steps
    with mpmath.workprec(prec):
        modulus = res ** (max_steps + 2)
        N, D = n0 % modulus, d0 % modulus
        x = mpmath.mpf(n0) / d0
        total = mpmath.log(max(abs(n0), d0))
        scale = mpmath.mpf(1)
        converged = False
        steps = 0
        for steps in range(1, max_steps + 1):
            scale /= 4
            fx = (((x * x) - b4) * x - 2 * b6) * x - b8
            gx = (((4 * x) + b2) * x + 2 * b4) * x + b6
            N2 = (N ** 4 - b4 * N * N * D * D - 2 * b6 * N * D ** 3 - b8 * D ** 4) % modulus
            D2 = (4 * N ** 3 * D + b2 * N * N * D * D + 2 * b4 * N * D ** 3 + b6 * D ** 4) % modulus
            g = gcd(gcd(N2, res), gcd(D2, res))
            term = (mpmath.log(max(abs(fx), abs(gx))) - 4 * mpmath.log(max(abs(x), 1))
                    - mpmath.log(g)) * scale
            total += term
            modulus //= g
            N, D = (N2 // g) % modulus, (D2 // g) % modulus
            x = fx / gx
            if abs(term) < tol:
                converged = True
                break
        return HeightEstimate(float(total), converged, steps)


def canonical_height_by_doubling(p: CurvePoint, m: int) -> float:
    """Exact-coordinate oracle ``h(2^m P) / 4^m`` on the integral model (small ``m`` only)."""
    if m > 8:
        raise ValueError("exact doubling oracle is limited to m <= 8")
    if p.is_infinity:
        return 0.0
    u = p.curve.integral_scale()
    q = p
    for _ in range(m):
        q = q.double()
        if q.is_infinity:
            return 0.0
    xq = q.x * u * u
    with mpmath.workprec(120):
        return float(mpmath.log(max(abs(xq.numerator), xq.denominator)) / mpmath.mpf(4) ** m)


def nt_pairing(p: CurvePoint, q: CurvePoint, tol: float = 1e-12) -> HeightEstimate:
    """``(h(P+Q) - h(P) - h(Q)) / 2``; unconverged if any of the three heights is."""
    if p.curve != q.curve:
        raise ValueError("points lie on different curves")
    hs = [canonical_height(r, tol) for r in (p + q, p, q)]
    value = (hs[0].value - hs[1].value - hs[2].value) / 2
    return HeightEstimate(value, all(h.converged for h in hs), max(h.steps for h in hs))


DEFAULT_CURVE = CurveSpec.legendre(Fraction(3, 2))
