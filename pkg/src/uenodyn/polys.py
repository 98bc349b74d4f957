"""Dense univariate polynomials over Z and Q.

Polynomials are tuples of coefficients in *ascending* degree order, so
``(−1, 0, 1)`` is ``x**2 - 1``.  Integer and :class:`fractions.Fraction`
coefficients may be mixed; the zero polynomial is ``()``.

Everything here is exact.  Root locations are certified with Sturm
sequences and the Schur–Cohn recursion, never with floating eigenvalue
routines.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd, isqrt
from typing import Sequence

Poly = tuple

__all__ = [
    "trim", "degree", "padd", "psub", "pmul", "pneg", "pscale", "pdivmod",
    "pgcd", "derivative", "peval", "primitive", "squarefree_part", "monic",
    "cyclotomic", "reverse", "mirror", "sturm_sequence", "count_real_roots",
    "real_root_upper_bound", "isolate_max_real_root", "schur_cohn_count",
    "is_irreducible", "even_part_substitution", "pstr", "roots_inside_radius",
    "unit_circle_split",
]


def trim(p: Sequence) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def degree(p: Poly) -> int:
    return len(trim(p)) - 1


def padd(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return trim((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n))


def pneg(p: Poly) -> Poly:
    return tuple(-c for c in p)


def psub(p: Poly, q: Poly) -> Poly:
    return padd(p, pneg(q))


def pscale(p: Poly, c) -> Poly:
    return trim(c * a for a in p)


def pmul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def pdivmod(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    """Division with remainder over Q (exact when ``q`` is monic over Z)."""
    q = trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(trim(p))
    dq = len(q) - 1
    lc = q[-1]
    if len(r) <= dq:
        return (), tuple(r)
    quo = [0] * (len(r) - dq)
    for i in range(len(r) - 1, dq - 1, -1):
        c = r[i]
        if c == 0:
            continue
        if lc != 1:
            c = Fraction(c) / lc
            if c.denominator == 1:
                c = c.numerator
        quo[i - dq] = c
        for j in range(dq + 1):
            r[i - dq + j] -= c * q[j]
    return trim(quo), trim(r[:dq])


def primitive(p: Poly) -> Poly:
    """Scale to a primitive integer polynomial with positive leading coefficient."""
    p = trim(p)
    if not p:
        return ()
    den = 1
    for c in p:
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if ints[-1] < 0:
        g = -g
    return tuple(c // g for c in ints)


def monic(p: Poly) -> Poly:
    p = trim(p)
    lc = p[-1]
    return tuple(Fraction(c, 1) / lc if lc != 1 else c for c in p)


def pgcd(p: Poly, q: Poly) -> Poly:
    """Greatest common divisor, returned primitive over Z."""
    a, b = primitive(p), primitive(q)
    while b:
        _, r = pdivmod(a, b)
        a, b = b, primitive(r)
    return primitive(a)


def derivative(p: Poly) -> Poly:
    return trim(i * c for i, c in enumerate(p))[1:] if len(p) > 1 else ()


def peval(p: Poly, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def squarefree_part(p: Poly) -> Poly:
    p = primitive(p)
    g = pgcd(p, derivative(p))
    if len(g) <= 1:
        return p
    q, r = pdivmod(p, g)
    assert not r
    return primitive(q)


def reverse(p: Poly) -> Poly:
    """``x**deg * p(1/x)``."""
    p = trim(p)
    return trim(reversed(p))


def mirror(p: Poly) -> Poly:
    """``p(-x)``."""
    return trim(c if i % 2 == 0 else -c for i, c in enumerate(p))


def even_part_substitution(p: Poly) -> Poly:
    """For an even polynomial ``p(x) = q(x**2)`` return ``q``."""
    p = trim(p)
    if any(c for c in p[1::2]):
        raise ValueError("polynomial is not even")
    return tuple(p[0::2])


@lru_cache(maxsize=None)
@lru_cache(maxsize=None)
def cyclotomic(k: int) -> Poly:
    """The k-th cyclotomic polynomial, by exact division of ``x**k - 1``."""
    if k < 1:
        raise ValueError("k must be positive")
    num = (-1,) + (0,) * (k - 1) + (1,)
    for d in range(1, k):
        if k % d == 0:
            num, r = pdivmod(num, cyclotomic(d))
            assert not r
    return tuple(int(c) for c in num)


def pstr(p: Poly, var: str = "x") -> str:
    p = trim(p)
    if not p:
        return "0"
    terms = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if c == 0:
            continue
        mag = abs(c)
        sign = "-" if c < 0 else "+"
        if i == 0:
            body = str(mag)
        else:
            coef = "" if mag == 1 else f"{mag}*"
            body = f"{coef}{var}" + (f"**{i}" if i > 1 else "")
        terms.append((sign, body))
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# real roots


def sturm_sequence(p: Poly) -> list[Poly]:
    """Sturm chain of a squarefree polynomial, kept primitive to curb growth.

    Positive rescaling of each member does not change sign counts.
    """
    p = primitive(p)
    seq = [p, primitive(derivative(p))]
    while len(seq[-1]) > 1:
        _, r = pdivmod(seq[-2], seq[-1])
        if not r:
            break
        r = pneg(r)
        den = 1
        for c in r:
            den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
        ints = [int(Fraction(c) * den) for c in r]
        g = 0
        for c in ints:
            g = gcd(g, c)
        seq.append(tuple(c // g for c in ints))
    return seq


def _sign_changes(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _variations_at(seq: list[Poly], x) -> int:
    return _sign_changes(peval(s, x) for s in seq)


def _variations_at_inf(seq: list[Poly], sign: int = 1) -> int:
    vals = []
    for s in seq:
        d = len(s) - 1
        vals.append(s[-1] * (sign if d % 2 else 1))
    return _sign_changes(vals)


def count_real_roots(p: Poly, lo=None, hi=None) -> int:
    """Number of distinct real roots in ``(lo, hi]`` (None means infinite)."""
    seq = sturm_sequence(squarefree_part(p))
    vlo = _variations_at_inf(seq, -1) if lo is None else _variations_at(seq, lo)
    vhi = _variations_at_inf(seq, 1) if hi is None else _variations_at(seq, hi)
    return vlo - vhi


def real_root_upper_bound(p: Poly) -> Fraction:
    """Cauchy bound: every complex root has modulus below the returned value."""
    p = trim(p)
    lc = abs(Fraction(p[-1]))
    return 1 + max((abs(Fraction(c)) / lc for c in p[:-1]), default=Fraction(0))


def isolate_max_real_root(p: Poly, bits: int = 64, hint: float | None = None) -> tuple[Fraction, Fraction] | None:
    """Certified interval ``(lo, hi]`` holding the largest real root of ``p``.

    Returns None when ``p`` has no real root.  The width is at most
    ``2**-bits`` times ``max(1, |root|)``.  ``hint`` only seeds the bracket;
    correctness never depends on it.
    """
    sq = squarefree_part(p)
    if len(sq) <= 1:
        return None
    seq = sturm_sequence(sq)
    v_inf = _variations_at_inf(seq, 1)

    def above(x) -> int:
        return _variations_at(seq, x) - v_inf

    if _variations_at_inf(seq, -1) - v_inf == 0:
        return None
    bound = real_root_upper_bound(sq)
    lo, hi = -bound, bound
    if hint is not None:
        h = Fraction(hint).limit_denominator(1 << 40)
        eps = max(abs(h), Fraction(1)) / (1 << 30)
        a, b = h - eps, h + eps
        if -bound < a and b < bound and above(a) >= 1 and above(b) == 0:
            lo, hi = a, b
    while True:
        scale = max(abs(lo), abs(hi), Fraction(1))
        if hi - lo <= scale / (1 << bits):
            break
        mid = (lo + hi) / 2
        if above(mid) >= 1:
            lo = mid
        else:
            hi = mid
    return lo, hi


# ---------------------------------------------------------------------------
# unit disk


def schur_cohn_count(p: Poly) -> int | None:
    """Number of roots strictly inside the unit disk for a real polynomial.

    Runs the Schur–Cohn recursion; the count is the number of negative
    partial products of the recursion constants.  Returns None in the
    singular case (a zero constant), which includes roots on the circle.
    """
    f = [Fraction(c) for c in trim(p)]
    if not f:
        raise ValueError("zero polynomial")
    prod = Fraction(1)
    negatives = 0
    # f keeps its formal length; the reversal is taken at formal degree
    while len(f) > 1:
        m = len(f) - 1
        a0, am = f[0], f[m]
        nxt = [a0 * f[i] - am * f[m - i] for i in range(m)]
        delta = nxt[0]
        if delta == 0:
            return None
        prod *= delta
        if prod < 0:
            negatives += 1
        f = nxt
    return negatives


def roots_inside_radius(p: Poly, r) -> int | None:
    """Schur-Cohn count of roots with ``|z| < r`` for a positive rational ``r``."""
    r = Fraction(r)
    return schur_cohn_count([Fraction(c) * r ** i for i, c in enumerate(trim(p))])


def unit_circle_split(p: Poly, max_bits: int = 256) -> tuple[int, int] | None:
    """Certified ``(inside, outside)`` root counts relative to the unit circle.

    Counts inside the circles of radius ``1 - 2**-b`` and ``1 + 2**-b`` are
    compared for growing ``b``; agreement proves the thin annulus between
    them (and hence the unit circle) is root-free.  Self-reciprocal
    polynomials make the plain recursion singular at radius one, which is
    why the radius is perturbed instead.  Returns None if the annulus never
    clears, e.g. when a root lies on the circle.
    """
    n = degree(p)
    b = 8
    while b <= max_bits:
        eps = Fraction(1, 1 << b)
        inner = roots_inside_radius(p, 1 - eps)
        outer = roots_inside_radius(p, 1 + eps)
        if inner is not None and inner == outer:
            return inner, n - inner
        b *= 2
    return None


# ---------------------------------------------------------------------------
# irreducibility over Q


def _pmod(p, m: int) -> list[int]:
    out = [c % m for c in p]
    while out and out[-1] == 0:
        out.pop()
    return out


def _mp_divmod(a: list[int], b: list[int], m: int) -> tuple[list[int], list[int]]:
    a = a[:]
    inv = pow(b[-1], -1, m)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        c = a[-1] * inv % m
        s = len(a) - len(b)
        q[s] = c
        for i, bi in enumerate(b):
            a[s + i] = (a[s + i] - c * bi) % m
        while a and a[-1] == 0:
            a.pop()
    return q, a


def _mp_mul(a, b, m):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % m
    while out and out[-1] == 0:
        out.pop()
    return out


def _mp_gcd(a, b, m):
    while b:
        _, r = _mp_divmod(a, b, m)
        a, b = b, r
    if a:
        inv = pow(a[-1], -1, m)
        a = [c * inv % m for c in a]
    return a


def _mp_powmod(base, e, f, m):
    result = [1]
    base = _mp_divmod(base, f, m)[1]
    while e:
        if e & 1:
            result = _mp_divmod(_mp_mul(result, base, m), f, m)[1]
        base = _mp_divmod(_mp_mul(base, base, m), f, m)[1]
        e >>= 1
    return result


def _factor_degrees_mod_p(f: Poly, p: int) -> list[int] | None:
    """Degrees of the irreducible factors of ``f`` mod ``p`` (distinct-degree split).

    None when ``f`` is not squarefree mod ``p`` or loses degree.
    """
    fp = _pmod(f, p)
    if len(fp) != len(f):
        return None
    dfp = _pmod(derivative(f), p)
    if len(_mp_gcd(fp, dfp, p)) > 1:
        return None
    degrees: list[int] = []
    rest = fp
    h = [0, 1]
    d = 0
    while len(rest) - 1 >= 2 * (d + 1):
        d += 1
        h = _mp_powmod(h, p, rest, p)
        diff = h[:] + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        while diff and diff[-1] == 0:
            diff.pop()
        g = _mp_gcd(rest, diff, p)
        if len(g) > 1:
            degrees.extend([d] * ((len(g) - 1) // d))
            rest = _mp_divmod(rest, g, p)[0]
            h = _mp_divmod(h, rest, p)[1] if len(rest) > 1 else h
    if len(rest) > 1:
        degrees.append(len(rest) - 1)
    return degrees


def _small_primes(count: int) -> list[int]:
    out, c = [], 2
    while len(out) < count:
        if all(c % q for q in out if q * q <= c):
            out.append(c)
        c += 1
    return out


def _rational_root(p: Poly) -> bool:
    a0, an = abs(p[0]), abs(p[-1])
    if a0 == 0:
        return True

    def divisors(n):
        return [d for d in range(1, isqrt(n) + 1) if n % d == 0] + [n // d for d in range(1, isqrt(n) + 1) if n % d == 0]

    for num in set(divisors(a0)):
        for den in set(divisors(an)):
            for s in (1, -1):
                if peval(p, Fraction(s * num, den)) == 0:
                    return True
    return False


def is_irreducible(p: Poly, primes: int = 40) -> bool:
    """Irreducibility over Q of an integer polynomial of modest degree.

    A factor-degree sieve over small primes proves irreducibility in the
    common case.  If the sieve leaves a candidate degree open the answer
    comes from a full factorization.
    """
    p = primitive(p)
    n = len(p) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    if _rational_root(p):
        return False
    possible = set(range(1, n))
    for q in _small_primes(primes):
        degs = _factor_degrees_mod_p(p, q)
        if degs is None:
            continue
        sums = set()
        for r in range(1, len(degs)):
            for combo in combinations(degs, r):
                sums.add(sum(combo))
        possible &= sums
        if not possible:
            return True
    import sympy

    x = sympy.Symbol("x")
    expr = sum(int(c) * x**i for i, c in enumerate(p))
    _, factors = sympy.factor_list(expr, x)
    return len(factors) == 1 and factors[0][1] == 1
