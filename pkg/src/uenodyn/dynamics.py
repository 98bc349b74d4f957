"""Dynamical and arithmetic degrees of group automorphisms of abelian varieties.

The first dynamical degree of ``f`` is the square of the spectral radius
of its analytic representation.  For the integer matrices used on ``E^n``
the arithmetic degree of a point is read from Néron–Tate heights: each
coordinate of ``f^m(x)`` is an integer combination of the base points, so
``h(f^m x)`` is a quadratic form in the rows of ``M^m`` with the Gram
matrix of the base points as coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .cyclo import embed_complex, residues
from .elliptic import CurvePoint, CurveSpec, is_torsion, naive_height, nt_pairing
from .intervals import ComplexInterval, RatInterval
from .lattice import TorusModel
from .linalg import IntMat, charpoly, det, kron, spectral_radius, wedge_action
from .polys import is_irreducible

__all__ = [
    "ExperimentConfig", "DynDegreeReport", "ArithDegreeEstimate", "DensityReport",
    "KSCVerdict", "BoundViolation", "dynamical_degree", "invariant_divisor_check",
    "arithmetic_degree_estimate", "naive_orbit_crosscheck", "density_heuristic",
    "ksc_verdict", "cm_type", "pisot_experiment", "gram_matrix", "quadratic_heights",
    "orbit_point",
]

RANK_CAP = 8
FINITE_ORDER_BOUND = 240
EIG_PRECISION = 120


class BoundViolation(AssertionError):
    """``1 <= a_f <= d_1`` failed; this indicates an implementation error."""


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    curve: CurveSpec
    n: int
    matrix: IntMat
    base_points: tuple[CurvePoint, ...]
    iterations: int = 40
    tol_gram: float = 1e-8
    tol_ksc: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.matrix.shape != (self.n, self.n):
            raise ValueError(f"matrix must be {self.n}x{self.n}")
        if abs(det(self.matrix)) != 1:
            raise ValueError("matrix is not unimodular")
        if len(self.base_points) != self.n:
            raise ValueError(f"expected {self.n} base points, got {len(self.base_points)}")
        for p in self.base_points:
            if p.curve != self.curve:
                raise ValueError(f"base point {p} is not on the configured curve")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")


def pisot_experiment(n: int = 3, iterations: int = 40) -> ExperimentConfig:
    """The Pisot companion matrix acting on ``E^n`` for the default Legendre curve and point (3, 3)."""
    from .elliptic import DEFAULT_CURVE
    from .linalg import pisot_seed
    seed = pisot_seed(n)
    p = DEFAULT_CURVE.point(3, 3)
    return ExperimentConfig(DEFAULT_CURVE, n, seed.matrix, (p,) * n, iterations)


# ---------------------------------------------------------------------------
# dynamical degree


def cm_type(k: int) -> list[int] | None:
    """Exponents of the embeddings forming the analytic representation; None for plain Z."""
    if k == 7:
        return [1, 2, 4]
    if k in (3, 4, 6):
        return [1]
    return None


@dataclass(frozen=True)
class DynDegreeReport:
    rho: RatInterval
    d1: RatInterval
    analytic_eigenvalues: tuple[ComplexInterval, ...]
    h11_eigenvalues: tuple[ComplexInterval, ...]
    invariant_divisor_free: bool | None
    exact_witnesses: tuple[int, int] | None
    eigenvalues_certified: bool

    def to_json(self) -> dict:
        return {"rho": self.rho.to_json(), "d1": self.d1.to_json(),
                "analytic_eigenvalues": [e.to_json() for e in self.analytic_eigenvalues],
                "h11_eigenvalues": [e.to_json() for e in self.h11_eigenvalues],
                "eigenvalues_certified": self.eigenvalues_certified,
                "invariant_divisor_free": self.invariant_divisor_free,
                "exact_witnesses": None if self.exact_witnesses is None else list(self.exact_witnesses)}


def _lattice_matrix(m) -> IntMat:
    """Integer action on H^1: a 2x2 identity block per factor for Z matrices."""
    if isinstance(m, IntMat):
        return kron(m, IntMat.identity(2))
    if m.k == 7:
        if m.shape != (1, 1):
            raise ValueError("only the rank one module over Z[zeta_7] is modelled")
        return TorusModel.klein().zmat(m)
    return TorusModel.ueno(m.k, m.nrows).zmat(m)


def _numeric_eigs(rows: list[list]) -> list:
    with mpmath.workprec(EIG_PRECISION):
        if len(rows) == 1:
            return [mpmath.mpc(rows[0][0])]
        ev = mpmath.eig(mpmath.matrix(rows), left=False, right=False)
        return [mpmath.mpc(e) for e in ev]


def _disk(z, radius_bits: int = EIG_PRECISION - 24) -> ComplexInterval:
    from mpmath import iv
    r = mpmath.mpf(2) ** (-radius_bits) * max(1, abs(z))
    re, im = mpmath.re(z), mpmath.im(z)
    return ComplexInterval(iv.mpf([re - r, re + r]), iv.mpf([im - r, im + r]))


def _analytic_eigenvalues(m) -> tuple[list[ComplexInterval], bool]:
    if isinstance(m, IntMat) or cm_type(m.k) is None:
        rows = [[int(a) for a in r] for r in m.entries]
        return [_disk(z) for z in _numeric_eigs(rows)], False
    out = []
    certified = m.shape == (1, 1)
    for e in cm_type(m.k):
        j = residues(m.k).index(e) + 1
        if certified:
            out.append(embed_complex(m[0, 0], j, EIG_PRECISION))
            continue
        rows = [[embed_complex(a, j, EIG_PRECISION).mid for a in r] for r in m.entries]
        out.extend(_disk(z, 40) for z in _numeric_eigs(rows))
    return out, certified


def dynamical_degree(m, bits: int = 64, check_divisors: bool = True) -> DynDegreeReport:
    """Certified spectral radius of the analytic representation and ``d_1 = rho^2``.

    The Z-matrix on H^1 has the analytic eigenvalues together with their
    conjugates, so its certified spectral radius is the one we want.
    """
    f = m if isinstance(m, IntMat) else _lattice_matrix(m)
    if det(f) == 0:
        raise ValueError("matrix is not invertible")
    rho = spectral_radius(f, bits)
    d1 = rho.square()
    eigs, certified = _analytic_eigenvalues(m)
    h11 = tuple(a * b.conjugate() for a in eigs for b in eigs)
    free, wit = None, None
    if check_divisors and _lattice_matrix(m).nrows <= RANK_CAP:
        free, wit = invariant_divisor_check(m)
    return DynDegreeReport(rho, d1, tuple(eigs), h11, free, wit, certified)


def invariant_divisor_check(m) -> tuple[bool, tuple[int, int]]:
    """``det(I - wedge^2 F)`` and ``det(I - wedge^4 F)`` on H^1 with its integral structure.

    Both nonzero means 1 is not an eigenvalue on H^2 or H^4, hence no
    invariant divisor or curve classes.
    """
    f = _lattice_matrix(m)
    if f.nrows > RANK_CAP:
        raise ValueError(f"Z-rank {f.nrows} exceeds the cap {RANK_CAP}")
    wit = []
    for p in (2, 4):
        if p > f.nrows:
            wit.append(1)
            continue
        w = wedge_action(f, p)
        wit.append(det(IntMat.identity(w.nrows) - w))
    return all(wit), (wit[0], wit[1])


# ---------------------------------------------------------------------------
# arithmetic degree


@dataclass(frozen=True)
class ArithDegreeEstimate:
    heights: tuple[float, ...]
    ratios: tuple[float, ...]
    limit_estimate: float
    iterations: int
    gram: tuple[tuple[float, ...], ...]
    gram_converged: bool
    all_torsion: bool
    noise_band: float
    converged: bool = True
    naive_readings: tuple[float, ...] = field(default=())

    def to_json(self) -> dict:
        return {"heights": list(self.heights), "ratios": list(self.ratios),
                "limit_estimate": self.limit_estimate, "iterations": self.iterations,
                "gram": [list(r) for r in self.gram], "gram_converged": self.gram_converged,
                "all_torsion": self.all_torsion, "noise_band": self.noise_band,
                "converged": self.converged,
                "naive_readings": list(self.naive_readings)}


def gram_matrix(points: Sequence[CurvePoint], tol: float) -> tuple[list[list[float]], bool]:
    n = len(points)
    gram = [[0.0] * n for _ in range(n)]
    ok = True
    cache: dict = {}
    for i in range(n):
        for j in range(i, n):
            key = (points[i], points[j])
            if key not in cache:
                est = nt_pairing(points[i], points[j], tol)
                cache[key] = est
            est = cache[key]
            ok = ok and est.converged
            gram[i][j] = gram[j][i] = est.value
    return gram, ok


def quadratic_heights(matrix: IntMat, gram: list[list[float]], iterations: int) -> list[Fraction]:
    """``sum_i row_i(M^m) G row_i(M^m)^T`` for ``m = 0..iterations`` (exact in the float entries)."""
    g = [[Fraction(x) for x in r] for r in gram]
    n = matrix.nrows
    power = IntMat.identity(n)
    out = []
    for _ in range(iterations + 1):
        total = Fraction(0)
        for row in power.entries:
            gv = [sum((g[a][b] * row[b] for b in range(n) if row[b]), Fraction(0)) for a in range(n)]
            total += sum((row[a] * gv[a] for a in range(n) if row[a]), Fraction(0))
        out.append(total)
        power = matrix @ power
    return out


def arithmetic_degree_estimate(cfg: ExperimentConfig) -> ArithDegreeEstimate:
    """Tail ratio of Néron–Tate heights along the orbit, normalised as ``max(h, 1)``."""
    gram, ok = gram_matrix(cfg.base_points, cfg.tol_gram)
    heights = quadratic_heights(cfg.matrix, gram, cfg.iterations)
    normed = [max(h, Fraction(1)) for h in heights]
    ratios = [float(b / a) for a, b in zip(normed, normed[1:])]
    all_torsion = all(is_torsion(p) for p in cfg.base_points)
    limit = 1.0 if all_torsion else ratios[-1]
    noise = abs(ratios[-1] - ratios[-2]) if len(ratios) > 1 else float("inf")
    converged = all_torsion or _tail_converged(ratios, cfg.tol_ksc)
    return ArithDegreeEstimate(tuple(float(h) for h in heights), tuple(ratios), limit,
                               cfg.iterations, tuple(tuple(r) for r in gram), ok, all_torsion, noise,
                               converged)


def _tail_converged(ratios: list[float], tol: float) -> bool:
    """Has the ratio sequence settled?

    Either the last step is at floating-point noise, or it is below ``tol``
    and the steps shrink at least geometrically.  Polynomial height growth
    (eigenvalues on the unit circle) gives steps shrinking like ``1/m^3``,
    which never passes the second test, so such runs stay unconverged
    instead of being mistaken for a limit.
    """
    if len(ratios) < 3:
        return False
    last = abs(ratios[-1] - ratios[-2])
    prev = abs(ratios[-2] - ratios[-3])
    if last <= 1e-12 * max(1.0, abs(ratios[-1])):
        return True
    return last < tol and prev > 0 and last / prev <= 0.5


@dataclass(frozen=True)
class OrbitRow:
    m: int
    naive: float
    quadratic: float

    @property
    def difference(self) -> float:
        return self.naive - self.quadratic


@dataclass(frozen=True)
class CrosscheckTable:
    rows: tuple[OrbitRow, ...]
    truncated: bool
    band: tuple[float, float]
    within_band: bool

    def to_json(self) -> dict:
        return {"rows": [{"m": r.m, "naive": r.naive, "hhat": r.quadratic,
                          "difference": r.difference} for r in self.rows],
                "truncated": self.truncated, "band": list(self.band), "within_band": self.within_band}


def orbit_point(cfg: ExperimentConfig, power: IntMat) -> list[CurvePoint]:
    """Exact coordinates of ``f^m(x)``: the ``i``-th is ``sum_j (M^m)_ij P_j``."""
    out = []
    for row in power.entries:
        q = cfg.curve.infinity()
        for c, p in zip(row, cfg.base_points):
            if c:
                q = q + p * c
        out.append(q)
    return out


def naive_orbit_crosscheck(cfg: ExperimentConfig, m_max: int = 4, slack: float = 2.0,
                           bit_budget: int = 1 << 22) -> CrosscheckTable:
    """Naive heights of exact orbit points against the quadratic-form heights.

    The band is set by ``m = 0..2`` and widened by ``slack``; later rows
    must stay inside it.  Rows whose predicted coordinate size exceeds the
    bit budget are not computed and the table is flagged as truncated.
    """
    if m_max > 6:
        raise ValueError("m_max is capped at 6")
    gram, _ = gram_matrix(cfg.base_points, cfg.tol_gram)
    quad = quadratic_heights(cfg.matrix, gram, m_max)
    rows = []
    truncated = False
    power = IntMat.identity(cfg.n)
    for m in range(m_max + 1):
        if float(quad[m]) / 0.69 > bit_budget:
            truncated = True
            break
        pts = orbit_point(cfg, power)
        rows.append(OrbitRow(m, sum(naive_height(p) for p in pts), float(quad[m])))
        power = cfg.matrix @ power
    ref = [r.difference for r in rows[:3]]
    lo, hi = min(ref) - slack, max(ref) + slack
    within = all(lo <= r.difference <= hi for r in rows)
    return CrosscheckTable(tuple(rows), truncated, (lo, hi), within)


# ---------------------------------------------------------------------------
# density and verdicts


@dataclass(frozen=True)
class DensityReport:
    verdict: str
    reasons: tuple[str, ...]
    charpoly_irreducible: bool
    finite_order: bool
    gram_positive_definite: bool
    nontorsion_points: int

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "reasons": list(self.reasons),
                "charpoly_irreducible": self.charpoly_irreducible, "finite_order": self.finite_order,
                "gram_positive_definite": self.gram_positive_definite,
                "nontorsion_points": self.nontorsion_points}


def _finite_order(m: IntMat) -> bool:
    ident = IntMat.identity(m.nrows)
    p = m
    for _ in range(FINITE_ORDER_BOUND):
        if p == ident:
            return True
        p = p @ m
    return False


def _positive_definite(gram: list[list[float]], tol: float) -> bool:
    with mpmath.workprec(80):
        try:
            mpmath.cholesky(mpmath.matrix(gram) - tol * mpmath.eye(len(gram)))
            return True
        except (ValueError, ZeroDivisionError):
            return False


def density_heuristic(cfg: ExperimentConfig, gram: list[list[float]] | None = None) -> DensityReport:
    """Evidence about Zariski density of the orbit; never a proof.

    ``plausibly-dense`` needs an irreducible characteristic polynomial, a
    matrix of infinite order and at least one non-torsion base point.
    Positive definiteness of the Gram matrix (independent base points) is
    reported as further evidence but not required: a single non-torsion
    point copied to every factor already has an orbit whose closure is
    invariant under an irreducible ``M``.
    """
    if gram is None:
        gram, _ = gram_matrix(cfg.base_points, cfg.tol_gram)
    irreducible = is_irreducible(tuple(int(c) for c in charpoly(cfg.matrix)))
    finite = _finite_order(cfg.matrix)
    nontorsion = sum(1 for p in cfg.base_points if not is_torsion(p))
    definite = _positive_definite(gram, cfg.tol_gram)
    reasons = []
    if nontorsion == 0:
        reasons.append("every base point is torsion: the orbit is finite")
    if finite:
        reasons.append("the matrix has finite order: the orbit is finite")
    if reasons:
        return DensityReport("not-dense", tuple(reasons), irreducible, finite, definite, nontorsion)
    if irreducible:
        reasons.append("characteristic polynomial is irreducible over Q")
        reasons.append(f"{nontorsion} of {cfg.n} base points are non-torsion")
        reasons.append("Gram matrix is positive definite" if definite
                       else "Gram matrix is only semidefinite (dependent base points)")
        return DensityReport("plausibly-dense", tuple(reasons), irreducible, finite, definite, nontorsion)
    reasons.append("characteristic polynomial is reducible: an invariant subtorus may trap the orbit")
    return DensityReport("inconclusive", tuple(reasons), irreducible, finite, definite, nontorsion)


@dataclass(frozen=True)
class KSCVerdict:
    verdict: str
    a_f: float
    d1: float
    discrepancy: float | None
    passed: bool
    density: str

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "a_f": self.a_f, "d1": self.d1,
                "discrepancy": self.discrepancy, "passed": self.passed, "density": self.density}


def ksc_verdict(dyn: DynDegreeReport, arith: ArithDegreeEstimate, density: DensityReport,
                tol: float = 1e-3, bound_slack: float = 1e-9) -> KSCVerdict:
    """Check ``1 <= a_f <= d_1`` and, for plausibly dense orbits, ``a_f = d_1`` within ``tol``.

    The bound is a theorem, so a settled estimate outside it is an error.
    An estimate whose ratio tail has not settled is reported as
    ``unconverged`` instead of being compared.
    """
    a_f = arith.limit_estimate
    d1_hi = float(dyn.d1.hi)
    d1 = float(dyn.d1.mid)
    inside = 1 - bound_slack <= a_f <= d1_hi + bound_slack
    if not inside and arith.converged:
        raise BoundViolation(f"a_f = {a_f!r} outside [1, d1 = {d1!r}]")
    if 1 in dyn.d1 and abs(a_f - 1) <= bound_slack:
        return KSCVerdict("trivial", a_f, d1, 0.0, True, density.verdict)
    if not arith.converged:
        return KSCVerdict("unconverged", a_f, d1, None, False, density.verdict)
    if density.verdict == "plausibly-dense":
        disc = abs(a_f - d1)
        return KSCVerdict("consistent" if disc < tol else "discrepant", a_f, d1, disc, disc < tol,
                          density.verdict)
    return KSCVerdict("vacuous", a_f, d1, None, True, density.verdict)

