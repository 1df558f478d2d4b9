import numpy as np
import pytest

from quartic_det.potentials import CoefficientPair, free_pair, make_schrodinger_square
from quartic_det.validation import GENERIC_PAIR, WELL_P


@pytest.fixture(scope="session")
def free():
    return free_pair(1.0)


@pytest.fixture(scope="session")
def bump():
    return CoefficientPair.from_dict(GENERIC_PAIR)


@pytest.fixture(scope="session")
def square():
    p = {"family": "poly_bump", "params": {"amplitude": 3.0, "start": 0.1, "stop": 0.9, "power": 3}}
    return make_schrodinger_square(p, 1.0)


@pytest.fixture(scope="session")
def well():
    return make_schrodinger_square(WELL_P, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(7)
