"""Identities on the Klein quotient built from Z[zeta_7].

The relations check samples automorphisms x -> u * gamma^tau(x) + a * x0 and
confirms the conjugation and twist orders.  The unit probe exhibits
cyclotomic units and bounds the regulator from below.
"""
import random

from uenodyn.autgroups import (
    KleinAut, klein_compose, klein_inverse, normalizer_relations_check, random_klein_aut,
    unit_group_probe,
)
from uenodyn.cyclo import CycInt

rel = normalizer_relations_check(samples=20, seed=1)
print("relations:", rel.to_json())

probe = unit_group_probe()
print(f"torsion units: {probe.torsion_order}, Dirichlet rank {probe.dirichlet_rank}, "
      f"exhibited rank {probe.exhibited_rank}")
for u, nm in zip(probe.units, probe.norms):
    print(f"   unit {u}  norm {nm}")
print(f"regulator >= {probe.regulator_lower:.6f}")

# Group axioms on random words.
rng = random.Random(7)
g, h, j = (random_klein_aut(rng) for _ in range(3))
assoc = klein_compose(klein_compose(g, h), j) == klein_compose(g, klein_compose(h, j))
identity = KleinAut(0, CycInt.from_int(7, 1), 0)
print("associative on a sample:", assoc)
print("g * g^-1 is the identity:", klein_compose(g, klein_inverse(g)) == identity)
