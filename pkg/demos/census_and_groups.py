"""Singular points of Ueno-type quotients and the shape of their automorphism groups.

For each CM order k in {2, 3, 4, 6} and small n we count the points of E^n
with nontrivial stabilizer under the diagonal action of zeta_k, sorted by
stabilizer order, and compare with the closed-form counts.  Then we print
the translation part of Aut(E^n / <zeta_k>).
"""
from uenodyn.autgroups import aut_group_summary
from uenodyn.lattice import census_audit, census_closed_forms, singular_census

for k in (2, 3, 4, 6):
    for n in (1, 2, 3):
        census = singular_census(k, n)
        closed = census_closed_forms(k, n)
        agree = census.as_dict() == closed.as_dict()
        print(f"k={k} n={n}: {census.as_dict()}  total {census.total()}  closed form agrees: {agree}")
    audit = census_audit(singular_census(k, 2))
    print(f"   audit (stabilizer order -> counted vs expected) for n=2: {audit}")

print()
for k in (2, 3, 4, 6):
    s = aut_group_summary(k, 3)
    print(f"Aut for k={k}, n=3: {s.display()}   translation part as expected: {s.matches}")
