import numpy as np
import pytest
import scipy.sparse as sp
from scipy.optimize import brentq

from quartic_det.exceptions import ConfigurationError
from quartic_det.potentials import CoefficientPair
from quartic_det.spectral import (
    clamped_beam,
    discretize_aux,
    discretize_full,
    localization,
    schrodinger_bound_state,
    smallest_eigenvalues,
)


@pytest.fixture(scope="module")
def beam_exact():
    # first root of cosh(x) cos(x) = 1, fourth power
    x = brentq(lambda x: np.cosh(x) * np.cos(x) - 1, 4.0, 5.0, xtol=1e-15)
    return x**4


def test_beam_oracle_value(beam_exact):
    assert beam_exact == pytest.approx(500.5639, abs=1e-4)


def test_beam_convergence_is_second_order(beam_exact):
    errs = [abs(smallest_eigenvalues(clamped_beam(1.0, n), 1).eigenvalues[0] - beam_exact) for n in (128, 256, 512)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)


def test_beam_grid_error_and_richardson(beam_exact):
    rep = smallest_eigenvalues(clamped_beam(1.0, 512), 1, grid_error=True)
    err = abs(rep.eigenvalues[0] - beam_exact)
    assert err <= 1.1 * rep.grid_error[0]
    coarse = smallest_eigenvalues(clamped_beam(1.0, 256), 1).eigenvalues[0]
    rich = (4 * rep.eigenvalues[0] - coarse) / 3
    assert abs(rich - beam_exact) < err / 50


def test_identity_shifted_matrix():
    d = np.arange(1.0, 201.0)
    A = sp.diags(d + 3.5)
    rep = smallest_eigenvalues(A, 3)
    assert np.allclose(np.sort(rep.eigenvalues), [4.5, 5.5, 6.5])


def test_residuals_and_limits():
    op = clamped_beam(1.0, 256)
    rep = smallest_eigenvalues(op, 2)
    norm = sp.linalg.norm(op.matrix, 1)
    assert np.all(rep.residuals <= 1e-8 * norm)
    with pytest.raises(ConfigurationError):
        smallest_eigenvalues(op, 7)
    with pytest.raises(ConfigurationError):
        clamped_beam(1.0, 32)


def test_free_auxiliary_spectra(free):
    h1 = smallest_eigenvalues(discretize_aux(free, "H1", 512), 2).eigenvalues
    h3 = smallest_eigenvalues(discretize_aux(free, "H3", 512), 3).eigenvalues
    h2 = smallest_eigenvalues(discretize_aux(free, "H2", 512), 1).eigenvalues
    assert abs(h1[0]) < 1e-3 and h1[1] > 100  # y = x
    assert np.all(np.abs(h3[:2]) < 1e-3) and h3[2] > 100  # y = 1 and y = x
    assert h2[0] > 1.0


def test_free_h3_matches_free_free_beam(free, beam_exact):
    # nonzero eigenvalues of the free-free beam equal the clamped-clamped ones
    h3 = smallest_eigenvalues(discretize_aux(free, "H3", 1024), 3, grid_error=True)
    assert h3.eigenvalues[2] == pytest.approx(beam_exact, abs=5 * h3.grid_error[2])


def test_quasi_derivative_boundary_condition_matters():
    # p nonzero at gamma: y''' and y''' + 2 p y' closures give different spectra
    cp = CoefficientPair(1.0, {"family": "box", "params": {"amplitude": 5.0}}, {"family": "zero"})
    op = discretize_aux(cp, "H1", 512)
    lam = smallest_eigenvalues(op, 2).eigenvalues
    free_p = CoefficientPair(1.0, {"family": "box", "params": {"amplitude": 5.0, "stop": 0.999}}, {"family": "zero"})
    lam_drop = smallest_eigenvalues(discretize_aux(free_p, "H1", 512), 2).eigenvalues
    assert abs(lam[1] - lam_drop[1]) > 1.0


def test_full_free_has_no_negative_eigenvalues(free):
    op = discretize_full(free, "line", 4.0, 1024)
    assert np.min(smallest_eigenvalues(op, 3).eigenvalues) > 0
    with pytest.raises(ConfigurationError):
        discretize_full(free, "line", 1.0, 1024)


@pytest.fixture(scope="module")
def well_kappa(well):
    return float(np.sqrt(-schrodinger_bound_state(well, 6.0, 4000)))


def test_square_well_embedded_eigenvalue(well, well_kappa):
    # H = h^2 sends the bound state -kappa^2 of h to kappa^4 > 0
    op = discretize_full(well, "line", 6.0, 4096)
    rep = smallest_eigenvalues(op, 4, shift=well_kappa**4)
    loc = [localization(op, rep.vectors[:, j], -1.0, 2.0) for j in range(4)]
    j = int(np.argmax(loc))
    assert loc[j] > 0.99
    assert rep.eigenvalues[j] == pytest.approx(well_kappa**4, rel=2e-3)


def test_truncation_independence():
    # an isolated eigenvalue below the continuum; same spacing, doubled box
    cp = CoefficientPair(1.0, {"family": "zero"}, {"family": "poly_bump", "params": {"amplitude": -300.0}})
    vals = []
    for L in (4.0, 8.0):
        op = discretize_full(cp, "line", L, int(round(256 * (1 + 2 * L))))
        vals.append(smallest_eigenvalues(op, 1, shift=-500.0).eigenvalues[0])
    assert vals[0] == pytest.approx(vals[1], rel=1e-6)


def test_negative_eigenvalue_of_deep_q_well():
    cp = CoefficientPair(1.0, {"family": "zero"}, {"family": "poly_bump", "params": {"amplitude": -300.0}})
    rep = smallest_eigenvalues(discretize_full(cp, "line", 4.0, 4096), 2, shift=-500.0)
    assert rep.eigenvalues[0] == pytest.approx(-157.4710, rel=1e-4)
