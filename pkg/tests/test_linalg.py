import random
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
import sympy
from hypothesis import example, given
from hypothesis import strategies as st

from uenodyn.cyclo import zeta
from uenodyn.linalg import (
    CycMat, IntMat, PisotConstructionError, charpoly, companion, det, invariant_factors, kron,
    pisot_seed, smith_normal_form, spectral_radius, spectral_radius_squared, wedge_action,
)

x = sympy.symbols("x")


def square(n, lo=-4, hi=4):
    return st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n)


any_square = st.integers(1, 5).flatmap(square)
rect = st.tuples(st.integers(1, 6), st.integers(1, 6)).flatmap(
    lambda rc: st.lists(st.lists(st.integers(-6, 6), min_size=rc[1], max_size=rc[1]),
                        min_size=rc[0], max_size=rc[0]))


@given(any_square)
def test_det_and_charpoly_match_sympy(rows):
    m = IntMat.of(rows)
    sm = sympy.Matrix(rows)
    assert det(m) == sm.det()
    assert charpoly(m) == tuple(reversed(sm.charpoly(x).all_coeffs()))


@given(any_square, any_square)
def test_det_multiplicative(a, b):
    if len(a) != len(b):
        return
    assert det(IntMat.of(a) @ IntMat.of(b)) == det(IntMat.of(a)) * det(IntMat.of(b))


def test_cyclotomic_charpoly_example():
    # multiplication by zeta_3 - 1 on Z[zeta_3]
    m = CycMat.of(3, [[zeta(3) - 1]])
    assert charpoly(m.regular_rep()) == (3, 3, 1)


def test_cyclotomic_det_is_ring_element():
    z = zeta(7)
    m = CycMat.of(7, [[1 + z, z], [0, 1 + z * z]])
    assert det(m) == (1 + z) * (1 + z * z)
    assert charpoly(m)[0] == det(m)


def test_cyclotomic_inverse():
    z = zeta(7)
    m = CycMat.of(7, [[1 + z, z], [0, 1]])
    assert (m @ m.inverse()).is_identity()
    with pytest.raises(ValueError):
        CycMat.of(7, [[2]]).inverse()


def test_regular_rep_is_multiplicative():
    z = zeta(7)
    a = CycMat.of(7, [[1 + z, z], [z ** 3, 2]])
    b = CycMat.of(7, [[z, 0], [1, 1 - z]])
    assert (a @ b).regular_rep() == a.regular_rep() @ b.regular_rep()


@given(rect)
def test_smith_normal_form(rows):
    m = IntMat.of(rows)
    u, d, v = smith_normal_form(m)
    assert u @ m @ v == d
    assert abs(det(u)) == 1 and abs(det(v)) == 1
    diag = [d[i, i] for i in range(min(d.shape))]
    for i in range(d.nrows):
        for j in range(d.ncols):
            if i != j:
                assert d[i, j] == 0
    assert all(a >= 0 for a in diag)
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) if a == 0 else b % a == 0
    # oracle: product of the first r factors is the gcd of r x r minors
    r = min(d.shape)
    for size in range(1, r + 1):
        minors = [int(sympy.Matrix(rows).extract(list(ri), list(ci)).det())
                  for ri in combinations(range(m.nrows), size) for ci in combinations(range(m.ncols), size)]
        g = 0
        for mi in minors:
            g = sympy.gcd(g, mi)
        prod = 1
        for a in diag[:size]:
            prod *= a
        assert prod == abs(g)


def test_smith_examples():
    assert invariant_factors(IntMat.of([[2, 0], [0, 4]])) == [2, 4]
    assert invariant_factors(IntMat.zeros(2, 2)) == [0, 0]
    assert invariant_factors(IntMat.of([[2, 4], [6, 8]])) == [2, 4]


def test_smith_eight_by_eight():
    rng = random.Random(11)
    for _ in range(10):
        rows = [[rng.randint(-9, 9) for _ in range(8)] for _ in range(8)]
        m = IntMat.of(rows)
        u, d, v = smith_normal_form(m)
        assert u @ m @ v == d
        prod = 1
        for a in invariant_factors(m):
            prod *= a
        assert prod == abs(det(m))


@pytest.mark.parametrize("deg", range(1, 9))
def test_companion_round_trip(deg):
    rng = random.Random(deg)
    for _ in range(5):
        p = tuple(rng.randint(-9, 9) for _ in range(deg)) + (1,)
        assert charpoly(companion(p)) == p


def test_companion_rejects_non_monic():
    with pytest.raises(ValueError):
        companion((1, 2, 3))


@given(square(4), square(4))
def test_wedge_functoriality(a, b):
    a, b = IntMat.of(a), IntMat.of(b)
    for p in range(5):
        assert wedge_action(a @ b, p) == wedge_action(a, p) @ wedge_action(b, p)


@given(square(4))
def test_wedge_trace_is_elementary_symmetric(rows):
    m = IntMat.of(rows)
    cp = charpoly(m)
    # coefficient of x^{n-p} in det(xI - M) is (-1)^p e_p
    for p in range(5):
        assert wedge_action(m, p).trace() == (-1) ** p * cp[4 - p]
    assert wedge_action(m, 4) == IntMat.of([[det(m)]])


@given(any_square)
@example([[1, 1, -4], [1, 1, -4], [0, 1, -2]])  # nilpotent
def test_spectral_radius_encloses_oracle(rows):
    m = IntMat.of(rows)
    rho = spectral_radius(m, bits=40)
    # Roots of the square-free part of the exact charpoly: numpy's eigvals loses
    # about eps**(1/j) on a defective eigenvalue of multiplicity j.
    lam = sympy.Symbol("lam")
    cp = sympy.Poly(sympy.Matrix(rows).charpoly(lam).as_expr(), lam)
    sqf = sympy.quo(cp, sympy.gcd(cp, cp.diff(lam)))
    expected = max(abs(complex(r)) for r in sqf.nroots(n=30))
    assert float(rho.lo) - 1e-7 <= expected <= float(rho.hi) + 1e-7
    assert rho.width < Fraction(1, 2 ** 20)


def test_spectral_radius_examples():
    assert spectral_radius(IntMat.identity(3)).lo <= 1 <= spectral_radius(IntMat.identity(3)).hi
    sq = spectral_radius_squared(companion((1, -6, 1)), bits=80)
    target = (3 + 2 * sympy.sqrt(2)) ** 2
    assert sympy.Rational(sq.lo.numerator, sq.lo.denominator) <= target <= sympy.Rational(sq.hi.numerator, sq.hi.denominator)


def test_spectral_radius_of_cyclotomic_scalar():
    z = zeta(7)
    rho2 = spectral_radius_squared(CycMat.of(7, [[1 + z]]))
    assert abs(float(rho2.mid) - 3.2469796037174667) < 1e-12


def test_kron_matches_numpy():
    a = [[1, 2], [3, 4]]
    b = [[0, 1, 2], [1, -1, 0]]
    assert kron(IntMat.of(a), IntMat.of(b)).entries == tuple(map(tuple, np.kron(a, b).tolist()))


def test_int_matrix_inverse():
    m = IntMat.of([[2, 1], [1, 1]])
    assert (m @ m.inverse()).is_identity()
    assert m ** -2 == (m.inverse() @ m.inverse())
    with pytest.raises(ValueError):
        IntMat.of([[2, 0], [0, 1]]).inverse()


# -- Pisot seeds -------------------------------------------------------------

def test_pisot_three():
    seed = pisot_seed(3)
    assert seed.poly == (-1, -3, -3, 1)
    assert det(seed.matrix) == 1 and not seed.squared
    assert Fraction(384732, 100000) < seed.a_n.hi and seed.a_n.lo < Fraction(384733, 100000)
    root = 1 / (sympy.root(2, 3) - 1)
    assert sympy.Rational(seed.a_n.lo.numerator, seed.a_n.lo.denominator) < root
    assert root < sympy.Rational(seed.a_n.hi.numerator, seed.a_n.hi.denominator)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_pisot_seed_properties(n):
    seed = pisot_seed(n)
    roots = np.roots(list(reversed(seed.poly)))
    mods = sorted(abs(roots))
    assert mods[-1] > 1 and all(r < 1 for r in mods[:-1])
    assert det(seed.matrix) == 1
    assert charpoly(seed.matrix) == seed.poly
    assert sympy.Poly(list(reversed(seed.poly)), x).is_irreducible
    # the seed generates Q(2^(1/n)): the real root lies in that field
    u = float(seed.a_n.mid)
    base = 1 / (2 ** (1 / n) - 1)
    assert abs(u - (base ** 2 if seed.squared else base)) < 1e-9


@pytest.mark.parametrize("n", [7, 8])
def test_pisot_seed_failures_are_explicit(n):
    with pytest.raises(PisotConstructionError):
        pisot_seed(n)


@pytest.mark.parametrize("n", [1, 9])
def test_pisot_seed_range(n):
    with pytest.raises(ValueError):
        pisot_seed(n)
