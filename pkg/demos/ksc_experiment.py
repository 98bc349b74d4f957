"""Arithmetic degree of a Pisot automorphism of E^3 against its dynamical degree.

Reads pisot3.cfg, iterates the map on the point (3,3) broadcast to every
factor, and computes heights of iterates through a Gram matrix of pairings.
The ratio h(f^{m+1} x) / h(f^m x) should settle at d1.
"""
from pathlib import Path

from uenodyn.config import parse_config
from uenodyn.dynamics import (
    arithmetic_degree_estimate, density_heuristic, dynamical_degree, ksc_verdict,
)

cfg = parse_config(Path(__file__).with_name("pisot3.cfg"))
dyn = dynamical_degree(cfg.matrix)
arith = arithmetic_degree_estimate(cfg)
density = density_heuristic(cfg, [list(r) for r in arith.gram])
for m in (1, 5, 10, 20, 39):
    print(f"ratio at m={m:2d}: {arith.ratios[m - 1]:.12f}")
verdict = ksc_verdict(dyn, arith, density)
print(f"a_f ~ {verdict.a_f:.12f}, d1 ~ {verdict.d1:.12f}")
print(f"density: {density.verdict}; verdict: {verdict.verdict}")
