"""First dynamical degrees of linear maps on products of CM elliptic curves.

d1 is the square of the spectral radius of the analytic representation, and
is computed as a certified interval from the characteristic polynomial of
the lattice action.  The Pisot seeds give unimodular integer matrices whose
dynamical degree is the square of a Pisot unit.
"""
from uenodyn.cyclo import CycInt
from uenodyn.dynamics import dynamical_degree
from uenodyn.linalg import CycMat, pisot_seed

for n in range(2, 7):
    seed = pisot_seed(n)
    rep = dynamical_degree(seed.matrix)
    print(f"pisot n={n}: poly {seed.poly}, a_n in {seed.a_n}, d1 in {rep.d1}")

# Multiplication by the unit 1 + zeta_7 on the Klein model.
u = CycMat.of(7, [[CycInt.of(7, [1, 1])]])
rep = dynamical_degree(u)
print("d1(1 + zeta_7) in", rep.d1, "exact witnesses", rep.exact_witnesses)
