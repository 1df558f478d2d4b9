"""The finite-difference oracle on the clamped beam y'''' = lambda y.

The exact first eigenvalue is mu^4 with cosh(mu) cos(mu) = 1. The scheme is
second order, so the error drops by 4 per grid doubling and one Richardson
step removes most of it.
"""
import numpy as np
from scipy.optimize import brentq

from quartic_det.spectral import clamped_beam, smallest_eigenvalues

mu = brentq(lambda x: np.cosh(x) * np.cos(x) - 1, 4.0, 5.0, xtol=1e-15)
exact = mu**4
prev = None
for n in (128, 256, 512, 1024):
    lam = smallest_eigenvalues(clamped_beam(1.0, n), 1).eigenvalues[0]
    line = f"n = {n:5d}  lambda = {lam:.6f}  error {abs(lam - exact):.2e}"
    if prev is not None:
        line += f"  Richardson {abs((4 * lam - prev) / 3 - exact):.1e}"
    print(line)
    prev = lam
