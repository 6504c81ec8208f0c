import numpy as np
import pytest

from eqg.theta import ThetaEngine

TAU = 0.3 + 1.1j
HBAR = 0.07 + 0.03j


@pytest.fixture(scope="session")
def engine():
    return ThetaEngine(TAU)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def fd_points(rng, n, tau=TAU):
    s, t = rng.uniform(-0.5, 0.5, (2, n))
    return s + t * tau
