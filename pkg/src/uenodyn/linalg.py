"""Exact matrices over Z and Z[zeta_k].

Characteristic polynomials use Berkowitz's division-free recursion, so the
same code serves integer and cyclotomic entries.  Spectral radii are
certified through the Kronecker square: the largest real root of
``charpoly(F (x) F)`` is exactly ``rho(F)**2`` for a real matrix ``F``,
which keeps root isolation on the real line and in integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

import mpmath

from .cyclo import CycInt, is_unit, phi
from .intervals import RatInterval
from .polys import (
    even_part_substitution, is_irreducible, isolate_max_real_root,
    mirror, pmul, pstr, reverse, trim, unit_circle_split,
)

__all__ = [
    "IntMat", "CycMat", "PisotSeed", "PisotConstructionError", "charpoly",
    "smith_normal_form", "spectral_radius", "spectral_radius_squared",
    "companion", "pisot_seed", "wedge_action", "kron", "det", "zmatrix",
]


class _MatrixMixin:
    entries: tuple

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), (len(self.entries[0]) if self.entries else 0)

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return self.shape[1]

    def is_square(self) -> bool:
        r, c = self.shape
        return r == c

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> list[list]:
        return [list(r) for r in self.entries]

    def col(self, j: int) -> list:
        return [r[j] for r in self.entries]

    def _new(self, rows):
        raise NotImplementedError

    def _zero(self):
        raise NotImplementedError

    def _one(self):
        raise NotImplementedError

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.entries)) if other.entries else []
        out = []
        for row in self.entries:
            out_row = []
            for c in cols:
                acc = self._zero()
                for a, b in zip(row, c):
                    if a != 0 and b != 0:
                        acc = acc + a * b
                out_row.append(acc)
            out.append(out_row)
        return self._new(out)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return self._new([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return self._new([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __neg__(self):
        return self._new([[-a for a in r] for r in self.entries])

    def scale(self, c):
        return self._new([[c * a for a in r] for r in self.entries])

    @property
    def T(self):
        return self._new([list(c) for c in zip(*self.entries)])

    def identity_like(self):
        n = self.nrows
        return self._new([[self._one() if i == j else self._zero() for j in range(n)] for i in range(n)])

    def __pow__(self, e: int):
        if not self.is_square():
            raise ValueError("power of a non-square matrix")
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.identity_like(), self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def trace(self):
        acc = self._zero()
        for i in range(self.nrows):
            acc = acc + self.entries[i][i]
        return acc

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]):
        return self._new([[self.entries[i][j] for j in cols] for i in rows])

    def det(self):
        return det(self)

    def is_identity(self) -> bool:
        return self == self.identity_like()


@dataclass(frozen=True)
class IntMat(_MatrixMixin):
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len({len(r) for r in self.entries}) > 1:
            raise ValueError("ragged matrix")

    @classmethod
    def of(cls, rows) -> "IntMat":
        return cls(tuple(tuple(int(a) for a in r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "IntMat":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, r: int, c: int) -> "IntMat":
        return cls(tuple((0,) * c for _ in range(r)))

    @classmethod
    def diag(cls, values) -> "IntMat":
        n = len(values)
        return cls(tuple(tuple(values[i] if i == j else 0 for j in range(n)) for i in range(n)))

    def _new(self, rows):
        return IntMat(tuple(tuple(r) for r in rows))

    def _zero(self):
        return 0

    def _one(self):
        return 1

    def inverse(self) -> "IntMat":
        """Exact inverse of a unimodular matrix."""
        d = det(self)
        if abs(d) != 1:
            raise ValueError(f"matrix is not unimodular (det {d})")
        n = self.nrows
        adj = [[(-1) ** (i + j) * det(self.submatrix([r for r in range(n) if r != j],
                                                       [c for c in range(n) if c != i]))
                for j in range(n)] for i in range(n)]
        return IntMat.of([[a * d for a in r] for r in adj])

    def to_cyc(self, k: int) -> "CycMat":
        return CycMat.of(k, [[CycInt.from_int(k, a) for a in r] for r in self.entries])

    def __repr__(self) -> str:
        return f"IntMat({[list(r) for r in self.entries]})"


@dataclass(frozen=True)
class CycMat(_MatrixMixin):
    k: int
    entries: tuple[tuple[CycInt, ...], ...]

    def __post_init__(self):
        for r in self.entries:
            for a in r:
                if not isinstance(a, CycInt) or a.k != self.k:
                    raise ValueError(f"all entries must be CycInt with k={self.k}")

    @classmethod
    def of(cls, k: int, rows) -> "CycMat":
        return cls(k, tuple(tuple(a if isinstance(a, CycInt) else CycInt.from_int(k, a) for a in r)
                            for r in rows))

    @classmethod
    def identity(cls, k: int, n: int) -> "CycMat":
        return cls.scalar(k, n, CycInt.from_int(k, 1))

    @classmethod
    def scalar(cls, k: int, n: int, s: CycInt) -> "CycMat":
        z = CycInt.from_int(k, 0)
        return cls(k, tuple(tuple(s if i == j else z for j in range(n)) for i in range(n)))

    def _new(self, rows):
        return CycMat(self.k, tuple(tuple(r) for r in rows))

    def _zero(self):
        return CycInt.from_int(self.k, 0)

    def _one(self):
        return CycInt.from_int(self.k, 1)

    def scale(self, c):
        if isinstance(c, CycInt) and c.k != self.k:
            raise ValueError("scalar from a different ring")
        return self._new([[c * a for a in r] for r in self.entries])

    def unit_det(self):
        """Unit certificate of the determinant, or None if not invertible over Z[zeta_k]."""
        return is_unit(det(self))

    def inverse(self) -> "CycMat":
        cert = self.unit_det()
        if cert is None:
            raise ValueError("matrix is not invertible over Z[zeta_k]")
        n = self.nrows
        adj = [[det(self.submatrix([r for r in range(n) if r != j],
                                   [c for c in range(n) if c != i])) * ((-1) ** (i + j))
                for j in range(n)] for i in range(n)]
        if n == 1:
            adj = [[self._one()]]
        return self._new([[a * cert.inverse for a in r] for r in adj])

    def regular_rep(self) -> IntMat:
        """Integer matrix on Z^(n*phi(k)): block (i, j) is the regular representation of entry (i, j)."""
        d = phi(self.k)
        n = self.nrows
        m = self.ncols
        out = [[0] * (m * d) for _ in range(n * d)]
        for i in range(n):
            for j in range(m):
                block = self.entries[i][j].regular_rep()
                for a in range(d):
                    for b in range(d):
                        out[i * d + a][j * d + b] = block[a][b]
        return IntMat.of(out)

    def sort_key(self) -> tuple:
        return tuple(c for r in self.entries for a in r for c in a.coeffs)

    def __repr__(self) -> str:
        return f"CycMat(k={self.k}, {[[str(a) for a in r] for r in self.entries]})"


def kron(a: IntMat, b: IntMat) -> IntMat:
    ra, ca = a.shape
    rb, cb = b.shape
    return IntMat.of([[a[i // rb, j // cb] * b[i % rb, j % cb] for j in range(ca * cb)]
                      for i in range(ra * rb)])


def zmatrix(m) -> IntMat:
    """Integer matrix of ``m`` on the underlying lattice (identity for IntMat)."""
    return m.regular_rep() if isinstance(m, CycMat) else m


# ---------------------------------------------------------------------------
# determinants and characteristic polynomials


def _bareiss_det(rows: list[list[int]]) -> int:
    a = [r[:] for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def det(m):
    if not m.is_square():
        raise ValueError("determinant of a non-square matrix")
    if isinstance(m, IntMat):
        return _bareiss_det(m.rows())
    n = m.nrows
    if n == 0:
        return m._one()
    c = _berkowitz(m.rows(), m._zero(), m._one())
    return c[-1] if n % 2 == 0 else -c[-1]


def _berkowitz(a, zero, one) -> list:
    """Coefficients of ``det(x I - A)`` in descending order, division-free."""
    n = len(a)
    coeffs = [one, -a[0][0]]
    for r in range(1, n):
        # leading principal (r+1) block: M = a[:r][:r], R = a[r][:r], S = a[:r][r]
        row = [a[r][j] for j in range(r)]
        colv = [a[i][r] for i in range(r)]
        t = [one, -a[r][r]]
        v = colv
        for _ in range(r):
            acc = zero
            for x, y in zip(row, v):
                if x != 0 and y != 0:
                    acc = acc + x * y
            t.append(-acc)
            v = [sum((a[i][j] * v[j] for j in range(r) if a[i][j] != 0 and v[j] != 0), zero)
                 for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = zero
            for j in range(min(i, r) + 1):
                if t[i - j] != 0 and coeffs[j] != 0:
                    acc = acc + t[i - j] * coeffs[j]
            new.append(acc)
        coeffs = new
    return coeffs


def charpoly(m) -> tuple:
    """Monic characteristic polynomial, ascending coefficients over the entry ring."""
    if not m.is_square():
        raise ValueError("characteristic polynomial of a non-square matrix")
    if m.nrows == 0:
        return (m._one(),)
    return tuple(reversed(_berkowitz(m.rows(), m._zero(), m._one())))


def companion(poly: Sequence[int]) -> IntMat:
    """Companion matrix with ones on the subdiagonal and ``-c_i`` in the last column."""
    p = trim(poly)
    if len(p) < 2:
        raise ValueError("companion matrix needs degree >= 1")
    if p[-1] != 1:
        raise ValueError(f"polynomial {pstr(p)} is not monic")
    n = len(p) - 1
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for i in range(n):
        rows[i][n - 1] = -int(p[i])
    return IntMat.of(rows)


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(m: IntMat) -> tuple[IntMat, IntMat, IntMat]:
    """Return ``(U, D, V)`` with ``U @ m @ V == D`` and the divisibility chain on ``D``.

    ``U`` and ``V`` are unimodular; diagonal entries of ``D`` are non-negative.
    """
    a = m.rows()
    nr, nc = m.shape
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for r in a:
            r[dst] -= q * r[src]
        for r in v:
            r[dst] -= q * r[src]

    def nearest(x, p):  # quotient with |remainder| <= |p| / 2 keeps entries small
        q, r = divmod(x, p)
        return q + 1 if 2 * abs(r) > abs(p) else q

    t = 0
    while t < min(nr, nc):
        while True:
            nonzero = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j] != 0]
            if not nonzero:
                break
            _, pi, pj = min(nonzero)
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = a[t][t]
            for i in range(t + 1, nr):
                if a[i][t]:
                    add_row(i, t, nearest(a[i][t], p))
            for j in range(t + 1, nc):
                if a[t][j]:
                    add_col(j, t, nearest(a[t][j], p))
            if any(a[i][t] for i in range(t + 1, nr)) or any(a[t][j] for j in range(t + 1, nc)):
                continue
            # divisibility: fold a violating row into the pivot row
            bad = next((i for i in range(t + 1, nr) for j in range(t + 1, nc) if a[i][j] % p), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
            u[t] = [x + y for x, y in zip(u[t], u[bad])]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return IntMat.of(u), IntMat.of(a), IntMat.of(v)


def invariant_factors(m: IntMat) -> list[int]:
    _, d, _ = smith_normal_form(m)
    return [d[i, i] for i in range(min(d.shape))]


# ---------------------------------------------------------------------------
# spectral radius


def _float_hint(f: IntMat) -> float | None:
    try:
        with mpmath.workprec(80):
            ev = mpmath.eig(mpmath.matrix([[int(x) for x in r] for r in f.entries]), left=False, right=False)
        return float(max(abs(e) for e in ev)) ** 2
    except Exception:  # noqa: BLE001 - hint only
        return None


def spectral_radius_squared(m, bits: int = 64) -> RatInterval:
    """Certified enclosure of ``rho(m)**2``; CycMat uses its integer regular representation."""
    f = zmatrix(m)
    if not f.is_square():
        raise ValueError("spectral radius of a non-square matrix")
    r = charpoly(kron(f, f))
    iso = isolate_max_real_root(r, bits=bits, hint=_float_hint(f))
    if iso is None:  # only possible for the 0x0 matrix
        return RatInterval.point(0)
    lo, hi = iso
    return RatInterval(max(lo, Fraction(0)), max(hi, Fraction(0)))


def spectral_radius(m, bits: int = 64) -> RatInterval:
    """Certified enclosure of the spectral radius (max modulus of a characteristic root)."""
    return spectral_radius_squared(m, bits + 2).sqrt(bits + 8)


# ---------------------------------------------------------------------------
# exterior powers


def wedge_action(f: IntMat, p: int) -> IntMat:
    """Matrix of the induced map on the p-th exterior power, basis = sorted p-subsets."""
    n = f.nrows
    if not 0 <= p <= n:
        raise ValueError(f"exterior degree {p} out of range 0..{n}")
    subsets = list(combinations(range(n), p))
    rows = [[_bareiss_det([[f[i, j] for j in cj] for i in ci]) for cj in subsets] for ci in subsets]
    return IntMat.of(rows)


# ---------------------------------------------------------------------------
# Pisot seeds


class PisotConstructionError(RuntimeError):
    """The reversal candidate and its square both failed the Pisot-unit checks."""


@dataclass(frozen=True)
class PisotSeed:
    n: int
    poly: tuple[int, ...]
    matrix: IntMat
    a_n: RatInterval
    squared: bool = False
    checks: dict = field(default_factory=dict, compare=False)


def _pisot_checks(p: tuple[int, ...]) -> dict:
    n = len(p) - 1
    split = unit_circle_split(p)
    iso = isolate_max_real_root(p, bits=80)
    return {
        "irreducible": is_irreducible(p),
        "unit": abs(p[0]) == 1,
        "det_companion": det(companion(p)),
        "roots_inside_unit_disk": None if split is None else split[0],
        "one_root_outside": split is not None and split == (n - 1, 1),
        "max_real_root_above_one": iso is not None and iso[0] > 1,
    }


def _passes(c: dict) -> bool:
    return (c["irreducible"] and c["unit"] and c["det_companion"] == 1
            and c["one_root_outside"] and c["max_real_root_above_one"])


def _square_minpoly(p: tuple[int, ...]) -> tuple[int, ...]:
    """Minimal polynomial of u**2 from that of u, via ``p(x) p(-x) = (-1)**n q(x**2)``."""
    n = len(p) - 1
    prod = pmul(p, mirror(p))
    if n % 2:
        prod = tuple(-c for c in prod)
    return tuple(int(c) for c in even_part_substitution(prod))


def pisot_seed(n: int) -> PisotSeed:
    """Pisot unit generating Q(2**(1/n)) together with its SL(n, Z) companion matrix.

    The candidate is ``1 / (2**(1/n) - 1)``, whose minimal polynomial is the
    reversal of ``(x + 1)**n - 2`` up to sign.  If it fails (not Pisot, or
    the companion has determinant -1) its square is tried once.
    """
    if not 2 <= n <= 8:
        raise ValueError(f"pisot_seed supports 2 <= n <= 8, got {n}")
    base = [0] * (n + 1)
    for i in range(n + 1):
        base[i] = comb(n, i)
    base[0] -= 2
    cand = tuple(-c for c in reverse(tuple(base)))
    attempts = []
    for squared in (False, True):
        if squared:
            cand = _square_minpoly(cand)
        checks = _pisot_checks(cand)
        attempts.append({"poly": pstr(cand), **checks})
        if _passes(checks):
            lo, hi = isolate_max_real_root(cand, bits=80)
            return PisotSeed(n, cand, companion(cand), RatInterval(lo, hi), squared, checks)
    raise PisotConstructionError(f"no Pisot unit found for n={n}: {attempts}")

