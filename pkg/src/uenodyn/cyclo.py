"""Exact arithmetic in the cyclotomic integer rings Z[zeta_k].

An element is stored as its canonical residue modulo the k-th cyclotomic
polynomial in the power basis ``1, zeta, ..., zeta**(phi(k)-1)``.  Supported
orders are 1, 2, 3, 4, 6 and 7; the 14th roots of unity live inside
``Z[zeta_7]`` (as ``-zeta_7**j``) rather than in a ring of their own.

>>> z = zeta(7)
>>> (1 + z) * (z**5 + z**3 + z)
CycInt(7, (-1, 0, 0, 0, 0, 0))
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from mpmath import iv, mpf

from .intervals import DEFAULT_PRECISION, MAX_PRECISION, ComplexInterval, PrecisionExhausted, ivprec
from .polys import cyclotomic

__all__ = [
    "SUPPORTED_ORDERS", "CycInt", "UnitCertificate", "zeta", "phi", "residues",
    "ring_ops", "norm", "galois_apply", "embed_complex", "is_unit",
    "torsion_units", "unit_log_rank", "unit_log_vectors", "dirichlet_rank",
]

SUPPORTED_ORDERS = (1, 2, 3, 4, 6, 7)


@lru_cache(maxsize=None)
def _residues(k: int) -> tuple[int, ...]:
    return tuple(m for m in range(1, k + 1) if gcd(m, k) == 1)


def phi(k: int) -> int:
    return len(_residues(k))


def residues(k: int) -> list[int]:
    """Residues ``1 <= m <= k`` coprime to k, ascending; ``m_j`` is entry j-1."""
    return list(_residues(k))


@lru_cache(maxsize=1 << 12)
def _regular_rep(k: int, coeffs: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    d = len(coeffs)
    cols = [_mul_coeffs(k, coeffs, _reduce(k, [0] * j + [1])) for j in range(d)]
    return tuple(tuple(cols[j][i] for j in range(d)) for i in range(d))


def _reduce(k: int, coeffs: Iterable[int]) -> tuple[int, ...]:
    """Canonical residue of ``sum c_i zeta**i`` modulo Phi_k."""
    cyc = cyclotomic(k)
    d = len(cyc) - 1
    if len(coeffs) == d:
        return tuple(coeffs)
    # fold exponents mod k first: zeta**k == 1
    folded = [0] * max(k, d)
    for i, c in enumerate(coeffs):
        folded[i % k] += c
    r = folded
    for i in range(len(r) - 1, d - 1, -1):
        c = r[i]
        if c:
            r[i] = 0
            for j in range(d):
                r[i - d + j] -= c * cyc[j]
    return tuple(r[:d])


@lru_cache(maxsize=1 << 16)
def _mul_coeffs(k: int, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    # entries in practice are small and repeat a lot, hence the cache
    prod = [0] * (2 * len(a) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return _reduce(k, prod)


@dataclass(frozen=True)
class CycInt:
    """Element of Z[zeta_k]; build with :meth:`of` or :func:`zeta` to get reduction."""

    k: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.k not in SUPPORTED_ORDERS:
            raise ValueError(f"unsupported cyclotomic order {self.k}; use one of {SUPPORTED_ORDERS}")
        if len(self.coeffs) != phi(self.k):
            raise ValueError(f"expected {phi(self.k)} coefficients, got {len(self.coeffs)}")

    @classmethod
    def of(cls, k: int, coeffs: Sequence[int]) -> "CycInt":
        """Reduce an arbitrary coefficient vector (``sum c_i zeta**i``)."""
        return cls(k, _reduce(k, [int(c) for c in coeffs]))

    @classmethod
    def from_int(cls, k: int, n: int) -> "CycInt":
        return cls.of(k, [n])

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        if isinstance(other, CycInt):
            return self.k == other.k and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if not any(self.coeffs[1:]):
            return hash(self.coeffs[0])
        return hash((self.k, self.coeffs))

    # -- ring structure ---------------------------------------------------

    def _coerce(self, other) -> "CycInt":
        if isinstance(other, CycInt):
            if other.k != self.k:
                raise ValueError(f"mismatched cyclotomic orders {self.k} and {other.k}")
            return other
        if isinstance(other, int):
            return CycInt.from_int(self.k, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycInt(self.k, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "CycInt":
        return CycInt(self.k, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycInt(self.k, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, int):
            return CycInt(self.k, tuple(other * a for a in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycInt(self.k, _mul_coeffs(self.k, self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "CycInt":
        if e < 0:
            cert = is_unit(self)
            if cert is None:
                raise ZeroDivisionError(f"{self} is not a unit")
            return cert.inverse ** (-e)
        result, base = CycInt.from_int(self.k, 1), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- misc ---------------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_integer(self) -> bool:
        return not any(self.coeffs[1:])

    def __int__(self) -> int:
        if not self.is_integer():
            raise ValueError(f"{self} is not a rational integer")
        return self.coeffs[0]

    def sort_key(self) -> tuple[int, ...]:
        return self.coeffs

    def __repr__(self) -> str:
        return f"CycInt({self.k}, {self.coeffs})"

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        if not terms:
            return "0"
        return " + ".join(terms).replace("+ -", "- ")

    def regular_rep(self) -> list[list[int]]:
        """Integer matrix of multiplication by self in the power basis (columns = images)."""
        return [list(r) for r in _regular_rep(self.k, self.coeffs)]

    def galois(self, t: int) -> "CycInt":
        return galois_apply(self, t)

    def conjugates(self) -> list["CycInt"]:
        return [galois_apply(self, t) for t in residues(self.k)]


@dataclass(frozen=True)
class UnitCertificate:
    element: CycInt
    inverse: CycInt

    def __post_init__(self):
        if self.element * self.inverse != CycInt.from_int(self.element.k, 1):
            raise ValueError("certificate does not multiply to 1")


def zeta(k: int, power: int = 1) -> CycInt:
    """``zeta_k ** power``."""
    return CycInt.of(k, [0] * (power % k) + [1])


def ring_ops(a: CycInt, b: CycInt, op: str = "mul") -> CycInt:
    """Binary ring operation by name (``add``, ``sub`` or ``mul``)."""
    if a.k != b.k:
        raise ValueError(f"mismatched cyclotomic orders {a.k} and {b.k}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown ring operation {op!r}")


def galois_apply(a: CycInt, t: int) -> CycInt:
    """Ring automorphism ``zeta_k -> zeta_k**t``."""
    if gcd(t, a.k) != 1:
        raise ValueError(f"exponent {t} is not coprime to {a.k}")
    out = [0] * a.k
    for i, c in enumerate(a.coeffs):
        out[(i * t) % a.k] += c
    return CycInt.of(a.k, out)


def norm(a: CycInt) -> int:
    """Product of all Galois conjugates; an exact rational integer."""
    prod = CycInt.from_int(a.k, 1)
    for b in a.conjugates():
        prod = prod * b
    return int(prod)


def is_unit(a: CycInt) -> UnitCertificate | None:
    """Certificate with exact inverse when ``|norm(a)| == 1``, else None.

    The inverse is the product of the non-trivial conjugates divided by the
    norm, which is exact because the norm is a sign.
    """
    n = norm(a)
    if abs(n) != 1:
        return None
    cofactor = CycInt.from_int(a.k, 1)
    for t in residues(a.k)[1:]:
        cofactor = cofactor * galois_apply(a, t)
    return UnitCertificate(a, cofactor * n)


def torsion_units(k: int) -> list[CycInt]:
    """All roots of unity in Z[zeta_k], sorted by coefficient vector.

    ``k = 14`` returns mu_14 inside Z[zeta_7].
    """
    base = 7 if k == 14 else k
    if base not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported cyclotomic order {k}")
    seen = {s * zeta(base, j) for j in range(base) for s in (1, -1)}
    return sorted(seen, key=CycInt.sort_key)


# ---------------------------------------------------------------------------
# complex embeddings


def embed_complex(a: CycInt, j: int, precision: int = DEFAULT_PRECISION) -> ComplexInterval:
    """Image of ``a`` under ``zeta_k -> exp(2 pi i m_j / k)`` as a certified rectangle.

    ``j`` is 1-based over :func:`residues`.
    """
    if precision < 32:
        raise ValueError("precision must be at least 32 bits")
    ms = residues(a.k)
    if not 1 <= j <= len(ms):
        raise ValueError(f"embedding index {j} out of range 1..{len(ms)}")
    m = ms[j - 1]
    with ivprec(precision):
        re = iv.mpf(0)
        im = iv.mpf(0)
        for i, c in enumerate(a.coeffs):
            if c == 0:
                continue
            e = (i * m) % a.k
            if e == 0:
                re += c
                continue
            if 4 * e == a.k:
                im += c
                continue
            if 2 * e == a.k:
                re -= c
                continue
            if 4 * e == 3 * a.k:
                im -= c
                continue
            ang = 2 * iv.pi * e / a.k
            cc = iv.mpf(c)
            re += cc * iv.cos(ang)
            im += cc * iv.sin(ang)
        return ComplexInterval(re, im)


def dirichlet_rank(k: int) -> int:
    """``r1 + r2 - 1`` for Q(zeta_k)."""
    d = phi(k)
    if k <= 2:
        return 0
    return d // 2 - 1


def _places(k: int) -> list[int]:
    """One embedding index per archimedean place (1-based)."""
    ms = residues(k)
    if k <= 2:
        return [1]
    return [ms.index(m) + 1 for m in ms if 2 * m < k]


def unit_log_vectors(units: Sequence[CycInt], precision: int) -> list[list]:
    """Rows ``[log |s_v(u)|**2 ...]`` over places v (complex places doubled)."""
    rows = []
    with ivprec(precision):
        for u in units:
            row = []
            for j in _places(u.k):
                z = embed_complex(u, j, precision)
                row.append(iv.log(z.abs2()))
            rows.append(row)
    return rows


def _iv_det(m):
    n = len(m)
    if n == 0:
        return iv.mpf(1)
    if n == 1:
        return m[0][0]
    total = iv.mpf(0)
    for c in range(n):
        minor = [row[:c] + row[c + 1:] for row in m[1:]]
        term = m[0][c] * _iv_det(minor)
        total = total + term if c % 2 == 0 else total - term
    return total


def _excludes_zero(x) -> bool:
    return x.a > 0 or x.b < 0


def _independent_subset(rows, ncols: int):
    """Largest (rows, cols) index sets with a minor certified nonzero."""
    nrows = len(rows)
    for r in range(min(nrows, ncols), 0, -1):
        for ri in combinations(range(nrows), r):
            for ci in combinations(range(ncols), r):
                det = _iv_det([[rows[i][j] for j in ci] for i in ri])
                if _excludes_zero(det):
                    return list(ri), list(ci), det
    return [], [], iv.mpf(1)


def _is_torsion(u: CycInt) -> bool:
    return u in set(torsion_units(u.k))


def _relation_verified(target: CycInt, basis: Sequence[CycInt], coeffs: Sequence[Fraction]) -> bool:
    """Exact check that ``target**D / prod basis_i**(D c_i)`` is a root of unity."""
    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    acc = target ** den
    for b, c in zip(basis, coeffs):
        e = int(c * den)
        if e:
            acc = acc * (b ** (-e))
    return _is_torsion(acc)


def unit_log_rank(units: Sequence[CycInt], precision: int = DEFAULT_PRECISION,
                  max_precision: int = MAX_PRECISION, return_regulator: bool = False):
    """Rank of the subgroup of log-embedding space spanned by ``units``.

    The lower bound is a log minor whose interval excludes zero.  Every
    remaining unit is then shown dependent by an exact multiplicative
    relation (found numerically, verified in the ring).  Precision doubles
    until both sides meet.
    """
    units = list(units)
    for u in units:
        if is_unit(u) is None:
            raise ValueError(f"{u} is not a unit")
    if not units:
        return (0, iv.mpf(1)) if return_regulator else 0
    prec = precision
    while prec <= max_precision:
        rows = unit_log_vectors(units, prec)
        ncols = len(rows[0])
        ri, ci, reg = _independent_subset(rows, ncols)
        rank = len(ri)
        if rank == min(len(units), dirichlet_rank(units[0].k), ncols):
            return (rank, abs(reg)) if return_regulator else rank
        if _dependents_verified(units, rows, ri, ci, prec):
            return (rank, abs(reg)) if return_regulator else rank
        prec *= 2
    raise PrecisionExhausted(f"unit rank undecided at {max_precision} bits")


def _dependents_verified(units, rows, ri, ci, prec) -> bool:
    import mpmath

    basis = [units[i] for i in ri]
    with mpmath.workprec(prec):
        if ri:
            a = mpmath.matrix([[rows[i][j].mid for i in ri] for j in ci])
        for idx, u in enumerate(units):
            if idx in ri:
                continue
            if not ri:
                coeffs = []
            else:
                b = mpmath.matrix([rows[idx][j].mid for j in ci])
                sol = mpmath.lu_solve(a, b)
                coeffs = [Fraction(str(mpf(sol[t]))).limit_denominator(1000) for t in range(len(ri))]
            if not _relation_verified(u, basis, coeffs):
                return False
    return True
