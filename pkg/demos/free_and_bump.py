"""Determinant of the free operator and of a smooth bump, by both routes.

The direct route builds Jost solutions and takes a Wronskian; the minor
route only needs the propagator over [0, gamma]. For p = q = 0 both give
D = 1; for a bump they agree to integrator accuracy.
"""
import numpy as np

from quartic_det.determinant import det_halfline, det_line
from quartic_det.potentials import CoefficientPair, free_pair

free = free_pair(1.0)
bump = CoefficientPair(
    1.0,
    {"family": "poly_bump", "params": {"amplitude": 1.0, "start": 0.1, "stop": 0.8}},
    {"family": "truncated_gaussian", "params": {"amplitude": 1.0, "center": 0.6, "width": 0.15}},
)

ks = [0.5, 1.0 + 0.5j, 2.0 * np.exp(2.5j)]
print("free operator")
for k in ks:
    print(f"  k = {k:.3f}   D_half = {det_halfline(free, k).D:.12f}   D_line = {det_line(free, k).D:.12f}")

print("bump: direct vs minor")
for k in ks:
    for name, fn in (("half", det_halfline), ("line", det_line)):
        a, b = fn(bump, k, "direct").D, fn(bump, k, "minor").D
        print(f"  {name} k = {k:.3f}   D = {a:.10f}   |diff| = {abs(a - b):.1e}")
