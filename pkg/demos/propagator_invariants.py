"""Unimodularity and the symplectic identity of the propagator.

trace Q = 0 gives det Y = 1; the structure of Q gives Y^T J Y = J, so the
inverse is available as -J Y^T J. The propagator sees k only through k^4.
"""
import numpy as np

from quartic_det.ode import J, transfer_matrix
from quartic_det.potentials import random_bump_pair

rng = np.random.default_rng(0)
for _ in range(3):
    cp = random_bump_pair(rng)
    k = complex(rng.uniform(0.3, 2.5) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
    tm = transfer_matrix(cp, k)
    inv_err = np.linalg.norm(np.linalg.inv(tm.Y) + J @ tm.Y.T @ J)
    rot = np.linalg.norm(transfer_matrix(cp, 1j * k).Y - tm.Y)
    print(f"k = {k:.3f}  |det Y - 1| = {tm.det_defect():.1e}  symplectic {tm.symplectic_defect():.1e}"
          f"  inverse {inv_err:.1e}  ||Y(ik) - Y(k)|| = {rot:.1e}")
