import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quartic_det.exceptions import ConfigurationError, IntegrationRangeError
from quartic_det.ode import (
    DEFAULT_CONFIG,
    J,
    IntegratorConfig,
    SpectralPoint,
    exponential_data,
    free_transfer_matrix,
    jost_at,
    jost_at_zero,
    propagate,
    system_matrix,
    transfer_matrix,
)
from quartic_det.potentials import CoefficientPair

complex_k = st.builds(
    lambda r, a: r * cmath.exp(1j * a),
    st.floats(0.05, 3.0),
    st.floats(0.0, 2 * np.pi),
)


@settings(max_examples=30, deadline=None)
@given(k=complex_k, x=st.floats(-0.5, 1.5))
def test_system_matrix_is_traceless(bump, k, x):
    Q = system_matrix(x, k, bump)
    assert Q.trace() == 0
    assert Q[3, 0] == pytest.approx(k**4 - bump.q(x))


def test_free_propagator_closed_form(free):
    # k = 0: Taylor matrix
    Y0 = transfer_matrix(free, 0.0).Y
    assert np.allclose(Y0, free_transfer_matrix(0.0, 1.0), atol=1e-12)
    assert Y0[0, 3] == pytest.approx(1 / 6)
    for k in (0.7 + 0.2j, 2.0, -1.1 + 1.4j):
        assert np.allclose(transfer_matrix(free, k).Y, free_transfer_matrix(k, 1.0), atol=1e-10)


def test_free_closed_form_maps_exponentials():
    k, g = 1.3 - 0.4j, 0.8
    Y = free_transfer_matrix(k, g)
    for mu in (k, -k, 1j * k, -1j * k):
        assert np.allclose(Y @ exponential_data(mu, 0.0), exponential_data(mu, g))


@settings(max_examples=15, deadline=None)
@given(k=complex_k)
def test_liouville_and_symplectic(bump, k):
    tm = transfer_matrix(bump, k)
    assert tm.det_defect() <= 1e-9
    assert tm.symplectic_defect() <= 1e-8
    # inverse through J
    assert np.allclose(np.linalg.inv(tm.Y), -J @ tm.Y.T @ J, atol=1e-8)


@settings(max_examples=10, deadline=None)
@given(k=complex_k)
def test_propagator_depends_on_k4_only(bump, k):
    a = transfer_matrix(bump, k).Y
    for rot in (1j, -1, -1j):
        assert np.allclose(transfer_matrix(bump, rot * k).Y, a, atol=1e-12, rtol=0)


def test_printed_orientation_is_transpose(bump):
    tm = transfer_matrix(bump, 0.9)
    assert np.array_equal(tm.printed, tm.Y.T)
    assert SpectralPoint(1j).lam == 1


def test_propagation_round_trip(bump):
    k = 1.2 + 0.3j
    y0 = np.array([1.0, -0.5, 0.25, 2.0], dtype=complex)
    there = propagate(bump, k, 0.0, 1.0, y0)
    back = propagate(bump, k, 1.0, 0.0, there)
    assert np.allclose(back, y0, atol=1e-10)


def test_box_breakpoints_respected():
    box = CoefficientPair(1.0, {"family": "box", "params": {"amplitude": 3.0, "start": 0.3, "stop": 0.6}}, {"family": "zero"})
    tm = transfer_matrix(box, 0.8)
    assert tm.det_defect() < 1e-10


def test_jost_solutions_are_exponentials_for_free(free):
    k = 0.9 + 0.5j
    P = jost_at(free, k, (1, 2, 3, 4), 0.4)
    for col, mu in enumerate((-k, 1j * k, -1j * k, k)):
        assert np.allclose(P[:, col], exponential_data(mu, 0.4), atol=1e-10)
    assert np.allclose(jost_at_zero(free, k, 1), exponential_data(-k, 0.0))


def test_guard_and_interval_errors(bump):
    with pytest.raises(IntegrationRangeError):
        transfer_matrix(bump, 40.0)
    with pytest.raises(ConfigurationError):
        propagate(bump, 1.0, 0.0, 1.5, np.eye(4))
    with pytest.raises(ValueError):
        jost_at_zero(bump, 1.0, 3)


def test_integrator_config_validation():
    with pytest.raises(ConfigurationError):
        IntegratorConfig(rel_tol=1e-17)
    with pytest.raises(ConfigurationError):
        IntegratorConfig(method="Euler")
    with pytest.raises(ConfigurationError):
        IntegratorConfig.from_dict({"rtol": 1e-9})
    cfg = IntegratorConfig.from_dict(DEFAULT_CONFIG.to_dict())
    assert cfg == DEFAULT_CONFIG


def test_rk45_pair_agrees(bump):
    k = 1.1 + 0.2j
    a = transfer_matrix(bump, k).Y
    b = transfer_matrix(bump, k, IntegratorConfig(method="RK45", rel_tol=1e-10, abs_tol=1e-12)).Y
    assert np.allclose(a, b, atol=1e-7)
