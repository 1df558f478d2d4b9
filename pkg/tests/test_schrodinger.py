import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quartic_det.exceptions import ConfigurationError
from quartic_det.schrodinger import (
    bracket,
    check_square_halfline,
    check_square_line,
    jost_halfline,
    jost_line_wronskian,
    jost_minus_at,
    jost_plus_at,
)


def test_free_jost(free):
    k = 0.8 + 0.3j
    j = jost_halfline(free, k)
    assert j.value_at_0 == pytest.approx(1.0) and j.derivative_at_0 == pytest.approx(1j * k)
    assert jost_line_wronskian(free, k) == pytest.approx(-2j * k, rel=1e-10)


def test_bracket_antisymmetric():
    f, g = (1.0 + 2j, -0.5j), (0.3, 4.0)
    assert bracket(f, g) == -bracket(g, f)


@settings(max_examples=8, deadline=None)
@given(r=st.floats(0.3, 2.5), a=st.floats(0.0, 2 * np.pi))
def test_square_identities(square, r, a):
    k = r * np.exp(1j * a)
    assert check_square_halfline(square, k) <= 1e-6
    assert check_square_line(square, k) <= 1e-6


def test_wronskian_independent_of_base_point(square):
    k = 1.3 + 0.2j
    assert jost_line_wronskian(square, k, x=0.0) == pytest.approx(jost_line_wronskian(square, k, x=0.7), rel=1e-9)


def test_large_k_asymptotics(square):
    k = 20.0
    ratio = jost_line_wronskian(square, k) / (-2j * k)
    assert abs(ratio - 1) < 0.05


def test_bound_state_makes_wronskian_vanish(well):
    # psi_+ and psi_- are proportional at k = i kappa
    from scipy.optimize import brentq

    kappa = brentq(lambda t: jost_line_wronskian(well, 1j * t).real, 2.5, 3.5)
    plus, minus = jost_plus_at(well, 1j * kappa, 0.3), jost_minus_at(well, 1j * kappa, 0.3)
    assert abs(bracket(plus, minus)) < 1e-8 * (abs(plus[0] * minus[1]) + abs(plus[1] * minus[0]))


def test_requires_square(bump):
    with pytest.raises(ConfigurationError):
        check_square_halfline(bump, 1.0)
