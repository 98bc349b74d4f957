"""Word-level models of the automorphism groups of the Ueno-type and Klein quotients.

An automorphism of ``E^n / <sigma>`` is a pair ``(t, M)``: a translation
by a point fixed by ``sigma`` and a matrix over ``Z[zeta_k]``, taken modulo
the scalar subgroup.  Automorphisms of ``A_7 / mu_7`` are triples
``(a, u, tau)``: translation by ``a`` times a generator of the order 7
fixed group, multiplication by a unit ``u`` and the Galois twist
``zeta -> zeta^(2^tau)``.

Both models are checked against their action on torsion points, read
modulo the scalar orbits.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import mpmath

from .cyclo import CycInt, dirichlet_rank, is_unit, norm, torsion_units, unit_log_rank, zeta
from .elliptic import CurveSpec
from .lattice import TorsionPoint, TorusModel, endo_action, fixed_points
from .linalg import CycMat, IntMat, smith_normal_form

__all__ = [
    "UenoAut", "KleinAut", "compose", "inverse", "klein_compose", "klein_inverse",
    "canonical_rep", "aut_group_summary", "normalizer_relations_check", "unit_group_probe",
    "random_ueno_aut", "random_klein_aut", "orbit_rep", "expected_translation_factors",
    "ring_for_curve",
]


# ---------------------------------------------------------------------------
# quotients by scalars


def canonical_rep(m: CycMat, scalars: list[CycInt] | None = None) -> CycMat:
    """Least scalar multiple of ``m`` in coefficient-vector order.

    ``scalars`` defaults to ``mu_k``, generated by ``zeta_k``.
    """
    if scalars is None:
        scalars = [zeta(m.k, j) for j in range(m.k)]
    return min((m.scale(s) for s in scalars), key=lambda x: x.sort_key())


def orbit_rep(p: TorsionPoint, sigma: IntMat, order: int) -> TorsionPoint:
    """Least point of the ``<sigma>`` orbit of ``p`` (a point of the quotient)."""
    best, q = p, p
    for _ in range(order - 1):
        q = endo_action(sigma, q)
        if q.vector < best.vector:
            best = q
    return best


# ---------------------------------------------------------------------------
# Ueno-type quotients


@dataclass(frozen=True)
class UenoAut:
    k: int
    n: int
    translation: TorsionPoint
    matrix: CycMat

    def __post_init__(self):
        model = TorusModel.ueno(self.k, self.n)
        if self.translation.model != model:
            raise ValueError("translation lives on a different torus")
        if self.matrix.k != self.k or self.matrix.shape != (self.n, self.n):
            raise ValueError("matrix has the wrong shape or ring")
        if endo_action(model.sigma, self.translation) != self.translation:
            raise ValueError("translation is not fixed by sigma")
        if self.matrix.unit_det() is None:
            raise ValueError("matrix is not invertible over Z[zeta_k]")
        object.__setattr__(self, "matrix", canonical_rep(self.matrix))

    @property
    def model(self) -> TorusModel:
        return TorusModel.ueno(self.k, self.n)

    @classmethod
    def identity(cls, k: int, n: int) -> "UenoAut":
        model = TorusModel.ueno(k, n)
        return cls(k, n, model.zero(), CycMat.identity(k, n))

    @classmethod
    def of(cls, k: int, n: int, translation=None, matrix=None) -> "UenoAut":
        model = TorusModel.ueno(k, n)
        t = model.zero() if translation is None else translation
        m = CycMat.identity(k, n) if matrix is None else model.as_cyc(matrix)
        return cls(k, n, t, m)

    def act(self, p: TorsionPoint) -> TorsionPoint:
        """Action on the quotient: ``M p + t`` reduced to its sigma-orbit representative."""
        model = self.model
        img = endo_action(self.matrix, p) + self.translation
        return orbit_rep(img, model.zmat(model.sigma), self.k)

    def is_translation(self) -> bool:
        return self.matrix == canonical_rep(CycMat.identity(self.k, self.n))

    def to_json(self) -> dict:
        return {"k": self.k, "n": self.n, "translation": self.translation.to_json(),
                "matrix": [[str(a) for a in r] for r in self.matrix.entries]}


def compose(g: UenoAut, h: UenoAut) -> UenoAut:
    """``(t1, M1) o (t2, M2) = (t1 + M1 t2, M1 M2)``.

    The scalar ambiguity of ``M1`` is harmless: scalars fix ``t2``.
    """
    if (g.k, g.n) != (h.k, h.n):
        raise ValueError("automorphisms of different varieties")
    t = g.translation + endo_action(g.matrix, h.translation)
    return UenoAut(g.k, g.n, t, g.matrix @ h.matrix)


def inverse(g: UenoAut) -> UenoAut:
    minv = g.matrix.inverse()
    return UenoAut(g.k, g.n, -endo_action(minv, g.translation), minv)


def _random_cyc(k: int, rng: random.Random, bound: int = 1) -> CycInt:
    d = len(CycInt.from_int(k, 0).coeffs)
    return CycInt.of(k, [rng.randint(-bound, bound) for _ in range(d)])


def random_invertible(k: int, n: int, rng: random.Random, length: int = 3) -> CycMat:
    """Product of elementary matrices and a diagonal of roots of unity."""
    units = torsion_units(k) if k != 2 else [CycInt.from_int(2, 1), CycInt.from_int(2, -1)]
    m = CycMat.of(k, [[units[rng.randrange(len(units))] if i == j else 0 for j in range(n)]
                      for i in range(n)])
    for _ in range(length):
        i, j = rng.sample(range(n), 2)
        e = [[CycInt.from_int(k, int(a == b)) for b in range(n)] for a in range(n)]
        e[i][j] = _random_cyc(k, rng)
        m = m @ CycMat.of(k, e)
    return m


def random_fixed_translation(model: TorusModel, rng: random.Random) -> TorsionPoint:
    fix = fixed_points(model.sigma, model)
    t = model.zero()
    for d, gen in zip(fix.invariant_factors, fix.generators):
        t = t + gen.scale(rng.randrange(d))
    return t


def random_ueno_aut(k: int, n: int, rng: random.Random) -> UenoAut:
    model = TorusModel.ueno(k, n)
    return UenoAut(k, n, random_fixed_translation(model, rng), random_invertible(k, n, rng))


# ---------------------------------------------------------------------------
# structure summaries


def expected_translation_factors(k: int, n: int) -> tuple[int, ...]:
    return {2: (2,) * (2 * n), 3: (3,) * n, 4: (2,) * n, 6: ()}[k]


def ring_for_curve(curve: CurveSpec) -> int:
    """Cyclotomic order of the endomorphism ring, read off the j-invariant."""
    j = curve.j_invariant
    if j == 1728:
        return 4
    if j == 0:
        return 3
    return 2


@dataclass(frozen=True)
class AutGroupSummary:
    k: int
    n: int
    translation_factors: tuple[int, ...]
    expected_factors: tuple[int, ...]
    matrix_ring: str
    scalar_subgroup_order: int
    ring_torsion_units: int
    quotient: str

    @property
    def matches(self) -> bool:
        return self.translation_factors == self.expected_factors

    def display(self) -> str:
        counts: dict[int, int] = {}
        for d in self.translation_factors:
            counts[d] = counts.get(d, 0) + 1
        trans = " + ".join(f"(Z/{d})^{c}" for d, c in sorted(counts.items()))
        ring = self.matrix_ring
        lin = (f"PGL({self.n}, {ring})" if self.quotient == "PGL"
               else f"GL({self.n}, {ring})/<sigma>")
        return lin if not trans else f"{trans} x| {lin}"

    def to_json(self) -> dict:
        return {"k": self.k, "n": self.n, "translation_factors": list(self.translation_factors),
                "expected_factors": list(self.expected_factors), "matches": self.matches,
                "matrix_ring": self.matrix_ring, "scalar_subgroup_order": self.scalar_subgroup_order,
                "ring_torsion_units": self.ring_torsion_units, "quotient": self.quotient,
                "divides_all_scalar_units": self.scalar_subgroup_order == self.ring_torsion_units,
                "display": self.display()}


def aut_group_summary(k: int, n: int, curve: CurveSpec | None = None) -> AutGroupSummary:
    """Translation part and linear part of the automorphism group of the k-th quotient.

    For ``k = 2`` an optional curve selects the matrix ring: a curve with
    extra automorphisms enlarges it to ``Z[i]`` or ``Z[zeta_3]`` while the
    divided scalar subgroup stays ``<-1>``.
    """
    if k not in (2, 3, 4, 6):
        raise ValueError("k must be one of 2, 3, 4, 6")
    if n < 3:
        raise ValueError("the structure statement needs n >= 3")
    model = TorusModel.ueno(k, n)
    fix = fixed_points(model.sigma, model)
    ring_k = ring_for_curve(curve) if (k == 2 and curve is not None) else k
    ring_units = len(torsion_units(ring_k)) if ring_k != 2 else 2
    # the divided subgroup is <sigma> on every line; it is written PGL where
    # <sigma> is the whole group of scalar units
    quotient = "PGL" if k in (4, 6) else "GL/<sigma>"
    ring = "Z" if ring_k == 2 else f"Z[zeta_{ring_k}]"
    return AutGroupSummary(k, n, fix.invariant_factors, expected_translation_factors(k, n),
                           ring, k, ring_units, quotient)


# ---------------------------------------------------------------------------
# the Klein quotient


_KLEIN = TorusModel.klein()


def _gal_matrix(t: int) -> IntMat:
    """Integer matrix of ``zeta -> zeta^t`` on the power basis of Z[zeta_7]."""
    cols = [zeta(7, j).galois(t).coeffs for j in range(6)]
    return IntMat.of([[cols[j][i] for j in range(6)] for i in range(6)])


def _twist_exponent(tau: int) -> int:
    return pow(2, tau % 3, 7)


def _klein_generator() -> TorsionPoint:
    fix = fixed_points(_KLEIN.sigma, _KLEIN)
    return fix.generators[0]


def _unit_canonical(u: CycInt) -> CycInt:
    return min((u * zeta(7, j) for j in range(7)), key=lambda x: x.sort_key())


@dataclass(frozen=True)
class KleinAut:
    """``x -> u * gamma^tau(x) + a * x0`` on ``A_7``, with ``gamma: zeta -> zeta^2``.

    With ``canonical=True`` (the default) the unit is replaced by its least
    ``mu_7`` multiple, giving an element of the quotient group.
    """

    a: int
    unit: CycInt
    twist: int
    canonical: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.unit.k != 7 or is_unit(self.unit) is None:
            raise ValueError("unit must be a unit of Z[zeta_7]")
        object.__setattr__(self, "a", self.a % 7)
        object.__setattr__(self, "twist", self.twist % 3)
        if self.canonical:
            object.__setattr__(self, "unit", _unit_canonical(self.unit))

    @classmethod
    def identity(cls) -> "KleinAut":
        return cls(0, CycInt.from_int(7, 1), 0)

    def linear_zmat(self) -> IntMat:
        return IntMat.of(self.unit.regular_rep()) @ _gal_matrix(_twist_exponent(self.twist))

    def translation_multiplier(self) -> int:
        """The ``c`` in ``L x0 = c x0``: how the linear part acts on the fixed group."""
        x0 = _klein_generator()
        img = endo_action(self.linear_zmat(), x0)
        for c in range(1, 7):
            if x0.scale(c) == img:
                return c
        raise AssertionError("linear part does not preserve the fixed group of mu_7")

    def act(self, p: TorsionPoint, quotient: bool = True) -> TorsionPoint:
        img = endo_action(self.linear_zmat(), p) + _klein_generator().scale(self.a)
        if not quotient:
            return img
        return orbit_rep(img, _KLEIN.zmat(_KLEIN.sigma), 7)

    def to_json(self) -> dict:
        return {"a": self.a, "unit": str(self.unit), "twist": self.twist}


def klein_compose(g: KleinAut, h: KleinAut, canonical: bool = True) -> KleinAut:
    """``(a, u, tau) o (a', u', tau') = (a + c a', u gamma^tau(u'), tau + tau')``."""
    c = g.translation_multiplier()
    unit = g.unit * h.unit.galois(_twist_exponent(g.twist))
    return KleinAut(g.a + c * h.a, unit, g.twist + h.twist, canonical)


def klein_inverse(g: KleinAut, canonical: bool = True) -> KleinAut:
    back = (-g.twist) % 3
    u_inv = is_unit(g.unit).inverse.galois(_twist_exponent(back))
    c = g.translation_multiplier()
    return KleinAut(-g.a * pow(c, -1, 7), u_inv, back, canonical)


def _cyclotomic_units() -> list[CycInt]:
    z = zeta(7)
    return [1 + z, 1 + z + z * z]


def random_klein_aut(rng: random.Random, canonical: bool = True) -> KleinAut:
    u = torsion_units(7)[rng.randrange(14)]
    for base in _cyclotomic_units():
        e = rng.randint(-2, 2)
        u = u * base ** e
    return KleinAut(rng.randrange(7), u, rng.randrange(3), canonical)


@dataclass(frozen=True)
class RelationsRecord:
    conjugation_exponent: int | None
    twist_order: int | None
    fixed_group_factors: tuple[int, ...]
    fixed_group_order: int
    sampled_normalizer: int
    commuting_cubes: bool
    counterexample: str | None

    @property
    def ok(self) -> bool:
        return (self.conjugation_exponent == 2 and self.twist_order == 3
                and self.fixed_group_order == 7 and self.commuting_cubes
                and self.counterexample is None)

    def to_json(self) -> dict:
        return {"conjugation_exponent": self.conjugation_exponent, "twist_order": self.twist_order,
                "fixed_group_invariant_factors": list(self.fixed_group_factors),
                "fixed_group_order": self.fixed_group_order,
                "sampled_normalizer_elements": self.sampled_normalizer,
                "cubes_commute_with_g7": self.commuting_cubes,
                "counterexample": self.counterexample, "ok": self.ok}


def normalizer_relations_check(samples: int = 30, seed: int = 0) -> RelationsRecord:
    """Exact relations among ``g_7`` (multiplication by zeta) and the order 3 twist.

    The twist here is ``zeta -> zeta^4``, the inverse of ``gamma``, so that
    conjugating ``g_7`` by it gives ``g_7^2``.
    """
    z = IntMat.of(zeta(7).regular_rep())
    sigma = _gal_matrix(_twist_exponent(2))
    ident = IntMat.identity(6)
    conj = sigma.inverse() @ z @ sigma
    power, exponent = ident, None
    for e in range(1, 8):
        power = power @ z
        if power == conj:
            exponent = e
            break
    order, p = None, sigma
    for j in range(1, 7):
        if p == ident:
            order = j
            break
        p = p @ sigma
    _, d, _ = smith_normal_form(z - ident)
    factors = tuple(d[i, i] for i in range(6))
    fix_order = 1
    for f in factors:
        fix_order *= f
    rng = random.Random(seed)
    counterexample = None
    allowed = {z ** e for e in (1, 2, 4)}
    for _ in range(samples):
        h = random_klein_aut(rng, canonical=False).linear_zmat()
        if h.inverse() @ z @ h not in allowed:
            counterexample = f"conjugate of g7 by {h} is not g7, g7^2 or g7^4"
            break
        h3 = h @ h @ h
        if h3 @ z != z @ h3:
            counterexample = f"cube of {h} does not commute with g7"
            break
    return RelationsRecord(exponent, order, factors, fix_order, samples,
                           counterexample is None, counterexample)


@dataclass(frozen=True)
class UnitProbe:
    torsion_order: int
    units: tuple[CycInt, ...]
    norms: tuple[int, ...]
    exhibited_rank: int
    regulator_lower: float
    dirichlet_rank: int

    def to_json(self) -> dict:
        return {"torsion_order": self.torsion_order, "units": [str(u) for u in self.units],
                "norms": list(self.norms), "exhibited_rank": self.exhibited_rank,
                "regulator_lower_bound": self.regulator_lower, "dirichlet_rank": self.dirichlet_rank}


def unit_group_probe() -> UnitProbe:
    """Torsion and rank witnesses for the unit group of Z[zeta_7]."""
    units = tuple(_cyclotomic_units())
    rank, reg = unit_log_rank(list(units), return_regulator=True)
    return UnitProbe(len(torsion_units(7)), units, tuple(norm(u) for u in units), rank,
                     float(mpmath.mpf(reg.a)),
                     dirichlet_rank(7))
