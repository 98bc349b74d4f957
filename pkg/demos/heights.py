"""Canonical heights on y^2 = x(x-1)(x-3/2).

The canonical height is quadratic and vanishes exactly on torsion.  We
compare the telescoped series with the doubling limit and show the bounded
gap between naive and canonical heights.
"""
from uenodyn.elliptic import (
    DEFAULT_CURVE, canonical_height, canonical_height_by_doubling, is_torsion, naive_height,
    nt_pairing,
)

E = DEFAULT_CURVE
P = E.point(3, 3)
h = canonical_height(P)
print(f"h^(P) = {h.value:.15f} (converged {h.converged} after {h.steps} steps)")
print(f"doubling limit with 2^8 P: {canonical_height_by_doubling(P, 8):.15f}")
for m in (2, 3, 5):
    ratio = canonical_height(P * m).value / h.value
    print(f"h^({m}P) / h^(P) = {ratio:.12f}")
for m in range(1, 6):
    Q = P * m
    print(f"m={m}: naive - canonical = {naive_height(Q) - canonical_height(Q).value:+.4f}")
T = E.point(0, 0)
print("(0,0) is torsion:", is_torsion(T), " h^ =", canonical_height(T).value)
print("<P, P + T> =", nt_pairing(P, P + T).value)
