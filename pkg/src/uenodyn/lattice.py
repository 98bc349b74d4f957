"""Complex tori as lattices, their torsion points and the singular-point census.

A torus ``C^m / Z[zeta_k]^m`` is stored through its integer coordinates:
a point is a vector in ``(Q/Z)^r`` with ``r`` the Z-rank of the lattice,
and an endomorphism acts through the integer matrix of its lattice action.
For ``k = 2`` the factor curve is a general elliptic curve whose lattice is
``Z^2``; only the scalar ``-1`` is used on it, acting as ``-I_2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable

from .cyclo import zeta
from .linalg import CycMat, IntMat, det, kron, smith_normal_form

__all__ = [
    "TorusModel", "TorsionPoint", "FixedGroup", "SingularCensus", "PreimageRecord",
    "endo_action", "fixed_points", "singular_census", "census_closed_forms",
    "census_audit", "preimage_census", "CensusBudgetExceeded",
]

UENO_ORDERS = (2, 3, 4, 6)
DEFAULT_BUDGET = 10 ** 6


class CensusBudgetExceeded(RuntimeError):
    def __init__(self, bound: int, budget: int):
        super().__init__(f"fixed-point enumeration needs at least {bound} points (budget {budget})")
        self.bound = bound
        self.budget = budget


@dataclass(frozen=True)
class TorusModel:
    k: int
    m: int
    label: str

    @classmethod
    def ueno(cls, k: int, n: int) -> "TorusModel":
        if k not in UENO_ORDERS:
            raise ValueError(f"Ueno factors need k in {UENO_ORDERS}, got {k}")
        if n < 1:
            raise ValueError("n must be positive")
        return cls(k, n, f"ueno({k},{n})")

    @classmethod
    def klein(cls) -> "TorusModel":
        return cls(7, 1, "klein")

    @property
    def factor_rank(self) -> int:
        return 6 if self.k == 7 else 2

    @property
    def zrank(self) -> int:
        return self.m * self.factor_rank

    @property
    def sigma(self) -> CycMat:
        return CycMat.scalar(self.k, self.m, zeta(self.k))

    def as_cyc(self, mat) -> CycMat:
        if isinstance(mat, IntMat):
            mat = mat.to_cyc(self.k)
        if not isinstance(mat, CycMat) or mat.k != self.k or mat.shape != (self.m, self.m):
            raise ValueError(f"expected a {self.m}x{self.m} matrix over Z[zeta_{self.k}]")
        return mat

    def zmat(self, mat) -> IntMat:
        """Integer matrix of ``mat`` acting on lattice coordinates (column vectors)."""
        mat = self.as_cyc(mat)
        if self.k == 2:
            ints = IntMat.of([[int(a) for a in r] for r in mat.entries])
            return kron(ints, IntMat.identity(2))
        return mat.regular_rep()

    def zero(self) -> "TorsionPoint":
        return TorsionPoint(self, (Fraction(0),) * self.zrank)

    def point(self, coords: Iterable) -> "TorsionPoint":
        return TorsionPoint(self, tuple(Fraction(c) for c in coords))


@dataclass(frozen=True)
class TorsionPoint:
    model: TorusModel
    vector: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.vector) != self.model.zrank:
            raise ValueError(f"expected {self.model.zrank} coordinates")
        object.__setattr__(self, "vector", tuple(Fraction(c) % 1 for c in self.vector))

    @property
    def denominator(self) -> int:
        d = 1
        for c in self.vector:
            d = d * c.denominator // _gcd(d, c.denominator)
        return d

    def __add__(self, other: "TorsionPoint") -> "TorsionPoint":
        self._check(other)
        return TorsionPoint(self.model, tuple(a + b for a, b in zip(self.vector, other.vector)))

    def __neg__(self) -> "TorsionPoint":
        return TorsionPoint(self.model, tuple(-a for a in self.vector))

    def __sub__(self, other: "TorsionPoint") -> "TorsionPoint":
        return self + (-other)

    def scale(self, c: int) -> "TorsionPoint":
        return TorsionPoint(self.model, tuple(c * a for a in self.vector))

    def is_zero(self) -> bool:
        return not any(self.vector)

    def _check(self, other):
        if other.model != self.model:
            raise ValueError("torsion points from different tori")

    def to_json(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self.vector]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _apply(f: IntMat, v: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    return tuple(sum((a * x for a, x in zip(row, v) if a), Fraction(0)) for row in f.entries)


def endo_action(mat, p: TorsionPoint) -> TorsionPoint:
    """Image of a torsion point under the lattice endomorphism ``mat``."""
    f = mat if isinstance(mat, IntMat) and mat.shape == (p.model.zrank,) * 2 else p.model.zmat(mat)
    return TorsionPoint(p.model, _apply(f, p.vector))


@dataclass(frozen=True)
class FixedGroup:
    """``ker(M - I)`` on the torus, presented by invariant factors and generators."""

    invariant_factors: tuple[int, ...]
    generators: tuple[TorsionPoint, ...]

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def structure(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " + ".join(f"Z/{d}" for d in self.invariant_factors)

    def elements(self, budget: int = DEFAULT_BUDGET) -> list[TorsionPoint]:
        if self.order > budget:
            raise CensusBudgetExceeded(self.order, budget)
        model = self.generators[0].model
        out = []
        for coeffs in product(*(range(d) for d in self.invariant_factors)):
            v = [Fraction(0)] * model.zrank
            for c, g in zip(coeffs, self.generators):
                if c:
                    v = [a + c * b for a, b in zip(v, g.vector)]
            out.append(TorsionPoint(model, tuple(v)))
        return out

    def contains(self, p: TorsionPoint, mat) -> bool:
        return endo_action(mat, p) == p


def fixed_points(mat, model: TorusModel) -> FixedGroup:
    """Fixed subgroup of ``mat`` via the Smith form of ``F - I``.

    With ``U (F - I) V = D`` the solutions of ``(F - I) v in Z^r`` are
    ``v = V w`` with ``w_i in (1/d_i) Z``, so the columns ``V e_i / d_i``
    generate the group.
    """
    f = model.zmat(mat)
    a = f - IntMat.identity(model.zrank)
    _, d, v = smith_normal_form(a)
    factors, gens = [], []
    for i in range(model.zrank):
        di = d[i, i]
        if di == 0:
            raise ValueError("M - I is singular: the fixed locus is positive-dimensional")
        if di > 1:
            factors.append(di)
            gens.append(TorsionPoint(model, tuple(Fraction(x, di) for x in v.col(i))))
    if not gens:
        return FixedGroup((), (model.zero(),))
    return FixedGroup(tuple(factors), tuple(gens))


@dataclass(frozen=True)
class SingularCensus:
    k: int
    n: int
    counts: dict

    def as_dict(self) -> dict[str, int]:
        return dict(self.counts)

    def total(self) -> int:
        return sum(self.counts.values())


def _key(d: int) -> str:
    return f"1/{d}"


def _ordered(counts: dict[int, int]) -> dict[str, int]:
    return {_key(d): counts[d] for d in sorted(counts, reverse=True) if counts[d]}


def singular_census(k: int, n: int, budget: int = DEFAULT_BUDGET) -> SingularCensus:
    """Enumerate the points with nontrivial stabiliser under ``<zeta_k I>`` and sort them by type.

    An orbit whose stabiliser has order ``d`` is one quotient singularity
    of type ``1/d(1, ..., 1)``.
    """
    model = TorusModel.ueno(k, n)
    sigma = model.zmat(model.sigma)
    powers = [IntMat.identity(model.zrank)]
    for _ in range(1, k):
        powers.append(powers[-1] @ sigma)
    bound = sum(abs(det(powers[j] - powers[0])) for j in range(1, k))
    if bound > budget:
        raise CensusBudgetExceeded(bound, budget)
    points: set[tuple[Fraction, ...]] = set()
    for j in range(1, k):
        for p in fixed_points(model.as_cyc(_scalar_power(model, j)), model).elements(budget):
            points.add(p.vector)
    tally: dict[int, int] = {}
    for v in sorted(points):
        d = sum(1 for j in range(k) if tuple(c % 1 for c in _apply(powers[j], v)) == v)
        if d > 1:
            tally[d] = tally.get(d, 0) + 1
    counts = {}
    for d, pts in tally.items():
        orbit = k // d
        if pts % orbit:
            raise AssertionError("orbit bookkeeping inconsistent")
        counts[d] = pts // orbit
    return SingularCensus(k, n, _ordered(counts))


def _scalar_power(model: TorusModel, j: int) -> CycMat:
    return CycMat.scalar(model.k, model.m, zeta(model.k) ** j)


def census_closed_forms(k: int, n: int) -> SingularCensus:
    """Closed-form counts of singular points by type."""
    if k not in UENO_ORDERS:
        raise ValueError(f"k must be one of {UENO_ORDERS}")
    if n < 1:
        raise ValueError("n must be positive")
    if k == 2:
        counts = {2: 4 ** n}
    elif k == 3:
        counts = {3: 3 ** n}
    elif k == 4:
        counts = {4: 2 ** n, 2: (4 ** n - 2 ** n) // 2}
    else:
        counts = {6: 1, 3: (3 ** n - 1) // 2, 2: (4 ** n - 1) // 3}
    return SingularCensus(k, n, _ordered(counts))


def census_audit(census: SingularCensus) -> dict[int, tuple[int, int]]:
    """For each ``j`` compare ``|Fix(sigma^j)|`` with what the census predicts.

    A type ``1/d`` point has an orbit of ``k/d`` torus points, all fixed by
    ``sigma^j`` exactly when ``(k/d) | j``.
    """
    k, n = census.k, census.n
    model = TorusModel.ueno(k, n)
    out = {}
    for j in range(1, k):
        raw = abs(det(model.zmat(_scalar_power(model, j)) - IntMat.identity(model.zrank)))
        predicted = 0
        for key, c in census.counts.items():
            d = int(key.split("/")[1])
            if j % (k // d) == 0:
                predicted += c * (k // d)
        out[j] = (raw, predicted)
    return out


@dataclass(frozen=True)
class PreimageRecord:
    multiplier: int
    k: int
    n: int
    fixed_count: int
    preimage_count: int
    preimage_by_det: int

    @property
    def strictly_larger(self) -> bool:
        return self.preimage_count > self.fixed_count

    def to_json(self) -> dict:
        return {"multiplier": self.multiplier, "k": self.k, "n": self.n,
                "fixed_count": self.fixed_count, "preimage_count": self.preimage_count,
                "preimage_by_det": self.preimage_by_det, "strictly_larger": self.strictly_larger}


def preimage_census(multiplier: int, k: int, n: int) -> PreimageRecord:
    """Size of ``[l]^{-1}(Fix(sigma))`` against ``|Fix(sigma)|``.

    ``[l]`` has kernel of order ``l^r`` on a torus of Z-rank ``r``, so the
    preimage has ``l^r |Fix|`` points; ``|det(l (F - I))|`` gives the same
    number independently.
    """
    if multiplier < 1:
        raise ValueError("multiplier must be positive")
    model = TorusModel.ueno(k, n)
    fix = fixed_points(model.sigma, model)
    a = model.zmat(model.sigma) - IntMat.identity(model.zrank)
    by_det = abs(det(a.scale(multiplier)))
    return PreimageRecord(multiplier, k, n, fix.order, multiplier ** model.zrank * fix.order, by_det)
