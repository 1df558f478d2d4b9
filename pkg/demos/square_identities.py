"""H = (-d^2 - p)^2 factorises its determinant through second-order Jost data.

q = p^2 + p'' turns the fourth-order operator into a square, and
    half-line  D(k) = psi(0, ik) psi(0, k)
    line       D(k) = i/(4k^2) {psi_+, psi_-}(k) {psi_+, psi_-}(ik).
"""
import numpy as np

from quartic_det.potentials import make_schrodinger_square
from quartic_det.schrodinger import square_halfline_sides, square_line_sides

p = {"family": "poly_bump", "params": {"amplitude": 3.0, "start": 0.1, "stop": 0.9, "power": 3}}
cp = make_schrodinger_square(p, 1.0)
for k in (0.6, 1.2 * np.exp(0.7j), 2.0 * np.exp(3.0j)):
    D, prod = square_halfline_sides(cp, k)
    Dl, prodl = square_line_sides(cp, k)
    print(f"k = {k:.3f}  half {D:.8f} vs {prod:.8f}   line {Dl:.8f} vs {prodl:.8f}")
