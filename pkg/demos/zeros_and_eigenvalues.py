"""Zeros of k^4 D(k) for two wells on the line.

A deep negative q gives a true negative eigenvalue, a zero on arg k = pi/4.
The square of a Schrodinger well has no negative spectrum; its bound state
-kappa^2 becomes an eigenvalue kappa^4 embedded in [0, inf), a zero on the
real k axis (the edge of the physical sector).
"""
import cmath

import numpy as np

from quartic_det.potentials import CoefficientPair, make_schrodinger_square
from quartic_det.spectral import discretize_full, localization, schrodinger_bound_state, smallest_eigenvalues
from quartic_det.zeros import SearchRegion, entire_target, locate_zeros

deep = CoefficientPair(1.0, {"family": "zero"}, {"family": "poly_bump", "params": {"amplitude": -300.0}})
fd = smallest_eigenvalues(discretize_full(deep, "line", 4.0, 4096), 1, shift=-500.0).eigenvalues[0]
k0 = (-fd) ** 0.25 * cmath.exp(1j * np.pi / 4)
for z in locate_zeros(SearchRegion(k0.real - 0.4, k0.real + 0.4, k0.imag - 0.4, k0.imag + 0.4), entire_target(deep, "line")):
    print(f"deep q well: k0 = {z.k:.8f}, lambda = {z.lam.real:.5f} ({z.classification}); finite differences {fd:.5f}")

well = make_schrodinger_square({"family": "poly_bump", "params": {"amplitude": 20.0}}, 1.0)
kappa = np.sqrt(-schrodinger_bound_state(well, 6.0, 4000))
op = discretize_full(well, "line", 6.0, 4096)
rep = smallest_eigenvalues(op, 4, shift=kappa**4)
loc = [localization(op, rep.vectors[:, j], -1.0, 2.0) for j in range(4)]
for z in locate_zeros(SearchRegion(1.0, 4.5, -0.5, 0.5), entire_target(well, "line")):
    print(f"square well: k0 = {z.k:.8f}, lambda = {z.lam.real:.5f} ({z.classification}, sector edge {z.on_sector_boundary})")
print(f"  kappa^4 from h = {kappa**4:.5f}; localized discrete eigenvalue {rep.eigenvalues[int(np.argmax(loc))]:.5f}")
