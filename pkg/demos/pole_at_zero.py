"""Laurent coefficients of D at k = 0 and what the minors predict.

Half-line: a_{-1} = (1 + i) D34(0) / 2, the H1 minor. Line: a_{-4} = -Phi(0) / 8,
the H3 minor. Tuning the coupling c in (c p, c q) until D34(0) = 0 removes the
half-line pole, and the discretised H1 acquires an eigenvalue at 0.
"""
from scipy.optimize import brentq

from quartic_det.determinant import laurent_at_zero, minors
from quartic_det.ode import transfer_matrix
from quartic_det.potentials import CoefficientPair
from quartic_det.spectral import discretize_aux, smallest_eigenvalues

base = CoefficientPair(
    1.0,
    {"family": "poly_bump", "params": {"amplitude": 1.0, "start": 0.1, "stop": 0.8}},
    {"family": "truncated_gaussian", "params": {"amplitude": 1.0, "center": 0.6, "width": 0.15}},
)
for case in ("halfline", "line"):
    rep = laurent_at_zero(base, case)
    print(f"{case}: pole order {rep.pole_order}, leading {rep.leading_coefficient:.10f}, predicted {rep.predicted_leading:.10f}")


def d34(c):
    return minors(transfer_matrix(base.scaled(c), 0.0)).halfline(3, 4).real


cstar = brentq(d34, 30.0, 40.0, xtol=1e-13)
cp = base.scaled(cstar)
eig = smallest_eigenvalues(discretize_aux(cp, "H1", 1024), 1, grid_error=True)
print(f"D34(0) vanishes at c* = {cstar:.10f}")
print(f"  smallest H1 eigenvalue {eig.eigenvalues[0]:.2e} (grid error {eig.grid_error[0]:.1e})")
print(f"  Laurent at c*: pole order {laurent_at_zero(cp, 'halfline').pole_order}")
