import cmath
import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from mpmath import iv, mpf

from uenodyn.cyclo import (
    CycInt, SUPPORTED_ORDERS, UnitCertificate, dirichlet_rank, embed_complex, galois_apply,
    is_unit, norm, phi, residues, ring_ops, torsion_units, unit_log_rank, zeta,
)
from uenodyn.intervals import PrecisionExhausted
from uenodyn.polys import cyclotomic

ORDERS = [k for k in SUPPORTED_ORDERS]
x = sympy.symbols("x")


def elements(k, bound=4):
    return st.lists(st.integers(-bound, bound), min_size=phi(k), max_size=phi(k)).map(
        lambda c: CycInt.of(k, c))


def any_pair():
    return st.sampled_from(ORDERS).flatmap(lambda k: st.tuples(elements(k), elements(k), elements(k)))


def numeric(a, m=1):
    z = cmath.exp(2j * cmath.pi * m / a.k)
    return sum(c * z ** i for i, c in enumerate(a.coeffs))


# -- examples -------------------------------------------------------------

def test_root_of_unity_product():
    assert zeta(7) * zeta(7, 6) == 1


def test_unit_identity_for_one_plus_zeta7():
    z = zeta(7)
    assert (1 + z) * (z ** 5 + z ** 3 + z) == -1


def test_zeta3_sum():
    assert zeta(3) + zeta(3, 2) == -1


def test_mismatched_orders_rejected():
    with pytest.raises(ValueError):
        ring_ops(zeta(3), zeta(4), "add")


@pytest.mark.parametrize("a, expected", [(CycInt.from_int(7, 1), 1), (zeta(3) - 1, 3), (1 + zeta(7), 1)])
def test_norm_examples(a, expected):
    assert norm(a) == expected


def test_norm_of_one_plus_zeta7_is_cyclotomic_at_minus_one():
    assert norm(1 + zeta(7)) == sum(c * (-1) ** i for i, c in enumerate(cyclotomic(7)))


@given(st.sampled_from(ORDERS).flatmap(elements))
def test_norm_matches_resultant(a):
    """Oracle: the norm is the resultant of Phi_k and the representing polynomial."""
    phi_k = sympy.Poly(sympy.cyclotomic_poly(a.k, x), x)
    rep = sympy.Poly(list(reversed(a.coeffs)) or [0], x)
    expected = sympy.resultant(phi_k, rep) if not rep.is_zero else 0
    assert norm(a) == int(expected)


def test_galois_examples():
    z = zeta(7)
    assert galois_apply(z, 2) == zeta(7, 2)
    assert galois_apply(1 + z, 2) == 1 + zeta(7, 2)
    with pytest.raises(ValueError):
        galois_apply(z, 7)


@given(elements(7))
def test_galois_twist_has_order_three(a):
    assert galois_apply(galois_apply(galois_apply(a, 2), 2), 2) == a


@given(any_pair())
def test_ring_axioms(t):
    a, b, c = t
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == 0


@given(any_pair(), st.data())
def test_galois_is_ring_homomorphism(t, data):
    a, b, _ = t
    s = data.draw(st.sampled_from(residues(a.k)))
    assert galois_apply(a * b, s) == galois_apply(a, s) * galois_apply(b, s)
    assert galois_apply(a + b, s) == galois_apply(a, s) + galois_apply(b, s)


@given(st.sampled_from(ORDERS).flatmap(elements), st.data())
def test_galois_composition(a, data):
    s = data.draw(st.sampled_from(residues(a.k)))
    t = data.draw(st.sampled_from(residues(a.k)))
    assert galois_apply(galois_apply(a, s), t) == galois_apply(a, (s * t) % a.k)


@given(st.sampled_from(ORDERS).flatmap(elements))
def test_representation_is_canonical(a):
    assert CycInt.of(a.k, list(a.coeffs) + [0] * a.k) == a
    # adding a multiple of Phi_k does not change the element
    shifted = list(a.coeffs) + [0] * (len(cyclotomic(a.k)) - phi(a.k))
    bumped = [s + c for s, c in zip(shifted, cyclotomic(a.k))]
    assert CycInt.of(a.k, bumped) == a


# -- embeddings ------------------------------------------------------------

@pytest.mark.parametrize("k", ORDERS)
def test_embedding_of_one(k):
    for j in range(1, phi(k) + 1):
        assert 1 in embed_complex(CycInt.from_int(k, 1), j)


def test_embedding_of_i():
    assert 1j in embed_complex(zeta(4), 1)


def test_abs_of_one_plus_zeta7():
    box = embed_complex(1 + zeta(7), 1, 80).abs2()
    root = max(sympy.Poly(x ** 3 - 5 * x ** 2 + 6 * x - 1).real_roots())
    val = sympy.N(root, 30)
    assert iv.mpf(str(val)) in box or (box.a <= mpf(str(val)) <= box.b)
    assert abs(float(box.mid) - 3.2469796037174667) < 1e-12


@given(st.sampled_from(ORDERS).flatmap(elements))
def test_embedding_contains_float_value(a):
    for j, m in enumerate(residues(a.k), 1):
        box = embed_complex(a, j)
        assert abs(box.mid - numeric(a, m)) <= box.radius + 1e-9


@given(st.sampled_from(ORDERS).flatmap(elements))
def test_product_of_embeddings_encloses_norm(a):
    prod = None
    for j in range(1, phi(a.k) + 1):
        e = embed_complex(a, j, 96)
        prod = e if prod is None else prod * e
    assert norm(a) in prod.re or (prod.re.a <= norm(a) <= prod.re.b)
    assert prod.im.a <= 0 <= prod.im.b


def test_radius_shrinks_with_precision():
    a = 3 + 2 * zeta(7) - zeta(7, 4)
    assert embed_complex(a, 2, 200).radius < embed_complex(a, 2, 40).radius


# -- units -------------------------------------------------------------------

def test_unit_certificate_for_one_plus_zeta7():
    z = zeta(7)
    cert = is_unit(1 + z)
    assert cert.inverse == -(z ** 5 + z ** 3 + z)


@pytest.mark.parametrize("a", [CycInt.from_int(7, 2), zeta(3) - 1])
def test_non_units(a):
    assert is_unit(a) is None


def test_bad_certificate_rejected():
    with pytest.raises(ValueError):
        UnitCertificate(zeta(7), zeta(7))


@given(st.sampled_from(ORDERS).flatmap(lambda k: elements(k, 2)))
def test_unit_iff_norm_pm_one(a):
    cert = is_unit(a)
    assert (cert is not None) == (abs(norm(a)) == 1)
    if cert:
        assert a * cert.inverse == 1


@pytest.mark.parametrize("k, count", [(1, 2), (2, 2), (3, 6), (4, 4), (6, 6), (7, 14), (14, 14)])
def test_torsion_unit_counts(k, count):
    units = torsion_units(k)
    assert len(units) == count


@pytest.mark.parametrize("k", [3, 4, 6, 7])
def test_torsion_units_form_a_group(k):
    units = torsion_units(k)
    s = set(units)
    for a in units:
        assert is_unit(a).inverse in s
        for b in units:
            assert a * b in s
    for a in units:
        assert is_unit(a) is not None


def test_torsion_units_of_four():
    assert set(torsion_units(4)) == {CycInt.from_int(4, 1), CycInt.from_int(4, -1), zeta(4), -zeta(4)}


def test_dirichlet_rank():
    assert dirichlet_rank(7) == 2
    assert dirichlet_rank(3) == 0 and dirichlet_rank(4) == 0


def test_unit_log_rank_examples():
    z = zeta(7)
    assert unit_log_rank([z]) == 0
    rank, reg = unit_log_rank([1 + z, 1 + z + z * z], return_regulator=True)
    assert rank == 2 and reg.a > 1e-6
    assert abs(float(reg.mid) - 2.1018187284902891) < 1e-12
    assert unit_log_rank([1 + z, (1 + z) ** 2]) == 1
    assert unit_log_rank([1 + z, 1 + z + z * z, (1 + z) ** 3 * (1 + z + z * z) ** -2 * z]) == 2


def test_unit_log_rank_rejects_non_units():
    with pytest.raises(ValueError):
        unit_log_rank([CycInt.from_int(7, 2)])


def test_unit_log_rank_random_words():
    rng = random.Random(3)
    z = zeta(7)
    base = [1 + z, 1 + z + z * z]
    for _ in range(5):
        words = []
        for _ in range(3):
            u = torsion_units(7)[rng.randrange(14)]
            for b in base:
                u = u * b ** rng.randint(-2, 2)
            words.append(u)
        assert unit_log_rank(words) <= 2


def test_precision_cap_is_reported():
    z = zeta(7)
    with pytest.raises(PrecisionExhausted):
        unit_log_rank([1 + z, (1 + z) ** 2], precision=64, max_precision=32)
    with pytest.raises(ValueError):
        embed_complex(1 + z, 1, 8)
