from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import example, given
from hypothesis import strategies as st

from uenodyn.polys import (
    count_real_roots, cyclotomic, even_part_substitution, is_irreducible, isolate_max_real_root,
    mirror, pdivmod, pgcd, pmul, primitive, pstr, reverse, schur_cohn_count, squarefree_part,
    unit_circle_split,
)

x = sympy.symbols("x")
int_poly = st.lists(st.integers(-6, 6), min_size=2, max_size=7).filter(lambda c: c[-1] != 0)


def to_sympy(p):
    return sympy.Poly(list(reversed(p)), x)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 6, 7, 14])
def test_cyclotomic_agrees_with_sympy(k):
    assert cyclotomic(k) == tuple(reversed(sympy.Poly(sympy.cyclotomic_poly(k, x), x).all_coeffs()))


@given(int_poly, int_poly)
def test_division_identity(a, b):
    q, r = pdivmod(a, b)
    assert len(r) < len(b)
    lhs = [Fraction(c) for c in a]
    rhs = list(pmul(q, b)) + [0] * len(a)
    for i in range(len(a)):
        rhs[i] += r[i] if i < len(r) else 0
    assert [Fraction(c) for c in lhs] == [Fraction(c) for c in rhs[:len(a)]]


@given(int_poly, int_poly)
def test_gcd_matches_sympy(a, b):
    expected = sympy.gcd(to_sympy(a), to_sympy(b))
    ours = sympy.Poly(list(reversed(pgcd(a, b))), x)
    assert ours.monic() == expected.monic()


@given(int_poly)
def test_real_root_count_matches_numpy(p):
    sq = squarefree_part(p)
    roots = sympy.Poly(list(reversed(sq)), x).real_roots()
    assert count_real_roots(p) == len(roots)


@given(int_poly)
def test_max_real_root_is_bracketed(p):
    iso = isolate_max_real_root(p, bits=40)
    roots = sympy.Poly(list(reversed(p)), x).real_roots()
    if not roots:
        assert iso is None
        return
    top = max(roots)
    lo, hi = iso
    assert sympy.Rational(lo.numerator, lo.denominator) < top <= sympy.Rational(hi.numerator, hi.denominator)


def test_pisot_cubic_root_sign_change():
    lo, hi = isolate_max_real_root((-1, -3, -3, 1))
    assert Fraction(384, 100) < lo and hi < Fraction(385, 100)


def root_moduli(p):
    """Root moduli with multiplicity, from the square-free factors so repeated roots stay sharp."""
    _, factors = sympy.sqf_list(to_sympy(p), x)
    mods = []
    for f, mult in factors:
        for r in sympy.Poly(f, x).nroots(n=30):
            mods.extend([abs(complex(r))] * mult)
    return np.array(mods)


@given(int_poly)
@example([-1, 3, -3, 1])  # (x - 1)**3
def test_schur_cohn_counts_roots_inside(p):
    count = schur_cohn_count(p)
    mods = root_moduli(p)
    if count is None:
        return
    # skip cases numerically too close to the circle to judge
    if np.any(np.abs(mods - 1) < 1e-7):
        return
    assert count == int(np.sum(mods < 1))


@given(int_poly)
@example([-1, 3, -3, 1])
@example([1, 0, 3, 0, 3, 0, 1])  # (x**2 + 1)**3
def test_unit_circle_split(p):
    split = unit_circle_split(p)
    mods = root_moduli(p)
    if split is None:
        assert np.any(np.abs(mods - 1) < 1e-6)
        return
    assert split == (int(np.sum(mods < 1)), int(np.sum(mods > 1)))


def test_reciprocal_polynomial_needs_perturbed_radius():
    assert schur_cohn_count((1, -6, 1)) is None
    assert unit_circle_split((1, -6, 1)) == (1, 1)
    assert unit_circle_split((1, 0, 1)) is None


@given(int_poly)
def test_irreducibility_matches_sympy(p):
    p = primitive(p)
    if len(p) < 2:
        return
    factors = sympy.factor_list(to_sympy(p))[1]
    expected = len(factors) == 1 and factors[0][1] == 1
    assert is_irreducible(p) == expected


@pytest.mark.parametrize("p, expected", [
    ((1, 0, 0, 0, 1), True),
    ((1, 0, 2, 0, 1), False),
    ((-1, -3, -3, 1), True),
    ((4, 0, 0, 0, 1), False),  # x^4 + 4 = (x^2+2x+2)(x^2-2x+2)
])
def test_irreducibility_examples(p, expected):
    assert is_irreducible(p) is expected


def test_reverse_mirror_even_part():
    p = (1, 2, 3)
    assert reverse(p) == (3, 2, 1)
    assert mirror(p) == (1, -2, 3)
    assert even_part_substitution(pmul(p, mirror(p))) == (1, 2, 9)
    with pytest.raises(ValueError):
        even_part_substitution(p)


def test_pstr():
    assert pstr((-1, -3, -3, 1)) == "x**3 - 3*x**2 - 3*x - 1"
    assert pstr(()) == "0"
