import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quartic_det.exceptions import ConfigurationError, PrecisionError
from quartic_det.potentials import (
    SQUARE,
    CoefficientPair,
    Sampled,
    eval_coeffs,
    free_pair,
    make_schrodinger_square,
    random_bump_pair,
)

FAMILY_SPECS = [
    {"family": "box", "params": {"amplitude": 2.0, "start": 0.2, "stop": 0.7}},
    {"family": "poly_bump", "params": {"amplitude": -3.0}},
    {"family": "poly_bump", "params": {"amplitude": 1.5, "start": 0.1, "stop": 0.6, "power": 3}},
    {"family": "truncated_gaussian", "params": {"amplitude": 1.0, "center": 0.4, "width": 0.1}},
    {"family": "sine_bump", "params": {"amplitude": 0.5}},
]


@pytest.mark.parametrize("spec", FAMILY_SPECS)
@settings(max_examples=40, deadline=None)
@given(x=st.floats(-1e3, 1e3, allow_nan=False))
def test_support_is_compact(spec, x):
    cp = CoefficientPair(1.3, spec, spec)
    p, q = eval_coeffs(cp, x)
    if x < 0 or x > 1.3:
        assert p == 0.0 and q == 0.0


def test_vectorised_zero_outside():
    cp = CoefficientPair(1.0, FAMILY_SPECS[1], FAMILY_SPECS[3])
    x = np.random.default_rng(0).uniform(-1e3, 1e3, 1000)
    outside = (x < 0) | (x > 1)
    assert np.all(cp.p(x)[outside] == 0) and np.all(cp.q(x)[outside] == 0)


def test_eval_rejects_nonfinite(free):
    with pytest.raises(ValueError):
        eval_coeffs(free, float("nan"))


def test_poly_bump_peak_and_edges():
    cp = CoefficientPair(1.0, {"family": "poly_bump", "params": {"amplitude": 4.0, "start": 0.2, "stop": 0.6}}, {"family": "zero"})
    assert cp.p(0.4) == pytest.approx(4.0)
    assert cp.p(0.2) == 0.0 and cp.p.derivative(0.6, 1) == 0.0


@pytest.mark.parametrize("spec", FAMILY_SPECS[1:])
def test_derivatives_match_differences(spec):
    cp = CoefficientPair(1.0, spec, {"family": "zero"})
    x, h = 0.37, 1e-4
    d1 = (cp.p(x + h) - cp.p(x - h)) / (2 * h)
    d2 = (cp.p(x + h) - 2 * cp.p(x) + cp.p(x - h)) / h**2
    assert cp.p.derivative(x, 1) == pytest.approx(d1, rel=1e-6, abs=1e-8)
    assert cp.p.derivative(x, 2) == pytest.approx(d2, rel=1e-5, abs=1e-5)


def test_power_three_bump_is_c2_at_edges():
    spec = {"family": "poly_bump", "params": {"amplitude": 1.0, "start": 0.2, "stop": 0.8, "power": 3}}
    cp = CoefficientPair(1.0, spec, {"family": "zero"})
    assert abs(cp.p.derivative(0.2 + 1e-9, 2)) < 1e-5
    c1 = CoefficientPair(1.0, {"family": "poly_bump", "params": {"amplitude": 1.0, "start": 0.2, "stop": 0.8}}, {"family": "zero"})
    assert abs(c1.p.derivative(0.2 + 1e-9, 2)) > 1.0


def test_box_breakpoints_and_no_derivative():
    cp = CoefficientPair(1.0, FAMILY_SPECS[0], {"family": "zero"})
    assert cp.breakpoints == (0.2, 0.7)
    with pytest.raises(PrecisionError):
        cp.p.derivative(0.5, 2)


def test_unknown_keys_rejected():
    with pytest.raises(ConfigurationError):
        CoefficientPair(1.0, {"family": "zero", "amplitude": 1.0}, {"family": "zero"})
    with pytest.raises(ConfigurationError):
        CoefficientPair.from_dict({"gamma": 1.0, "p": {"family": "zero"}, "r": {}})
    with pytest.raises(ConfigurationError):
        CoefficientPair(1.0, {"family": "nope"}, {"family": "zero"})
    with pytest.raises(ConfigurationError):
        CoefficientPair(1.0, {"family": "box", "params": {"height": 1}}, {"family": "zero"})


def test_bad_gamma():
    with pytest.raises(ConfigurationError):
        free_pair(0.0)


def test_sampled_validation():
    grid = np.linspace(0, 1, 101)
    s = Sampled(1.0, grid, np.sin(np.pi * grid))
    assert s(0.5) == pytest.approx(1.0)
    with pytest.raises(ConfigurationError):
        Sampled(1.0, grid[::-1], grid)
    with pytest.raises(ConfigurationError):
        Sampled(1.0, np.linspace(0, 0.9, 101), grid)
    with pytest.raises(ConfigurationError):
        Sampled(1.0, grid, np.where(grid > 0.5, np.nan, 0.0))
    with pytest.raises(PrecisionError):
        Sampled(1.0, np.linspace(0, 1, 10), np.zeros(10)).derivative(0.5, 2)


def test_sampled_second_derivative():
    grid = np.linspace(0, 1, 401)
    s = Sampled(1.0, grid, np.sin(np.pi * grid) ** 2, "cubic")
    assert s.derivative(0.3, 2) == pytest.approx(2 * np.pi**2 * np.cos(0.6 * np.pi), rel=1e-3)


def test_square_q_is_p2_plus_p2prime(square):
    x = np.linspace(0.05, 0.95, 7)
    assert np.allclose(square.q(x), square.p(x) ** 2 + square.p.derivative(x, 2))
    assert square.q_spec == SQUARE


def test_square_requires_clamped_p():
    with pytest.raises(ConfigurationError):
        make_schrodinger_square({"family": "truncated_gaussian", "params": {"amplitude": 1.0}}, 1.0)


def test_round_trip_and_scaling(bump):
    again = CoefficientPair.from_dict(bump.to_dict())
    assert again == bump
    doubled = bump.scaled(2.0)
    assert doubled.p(0.4) == pytest.approx(2 * bump.p(0.4))
    assert doubled.q(0.55) == pytest.approx(2 * bump.q(0.55))


def test_random_pairs_are_reproducible():
    a = random_bump_pair(np.random.default_rng(3))
    b = random_bump_pair(np.random.default_rng(3))
    assert a == b and not a.is_free
