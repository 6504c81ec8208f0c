import numpy as np
import pytest

from eqg.errors import ConfigurationError, PoleError
from eqg.theta import ThetaEngine, lattice_distance

from conftest import fd_points

TAUS = [0.3 + 1.1j, 1j, -0.2 + 0.8j]


def independent_series(z, tau, cutoff=128):
    """Defining series with doubled cutoff, normalized by a numerical derivative."""
    n = np.arange(-cutoff, cutoff) + 0.5

    def vt(x):
        return np.sum(np.exp(1j * np.pi * tau * n**2 + 2j * np.pi * n * (x + 0.5)))
    h = 1e-4
    d0 = (8 * (vt(h) - vt(-h)) - (vt(2 * h) - vt(-2 * h))) / (12 * h)
    return vt(z) / d0


@pytest.mark.parametrize("tau", TAUS)
def test_normalization_and_zero(tau):
    e = ThetaEngine(tau)
    assert abs(e.theta_taylor(0, 1)[1] - 1) < 1e-13
    assert abs(e(0)) < 1e-15


@pytest.mark.parametrize("tau", TAUS)
def test_quasi_periodicity(tau, rng):
    e = ThetaEngine(tau)
    for z in fd_points(rng, 100, tau):
        t = e(z)
        assert abs(e(z + 1) + t) <= 1e-12 * max(1, abs(t))
        rhs = -np.exp(-1j * np.pi * tau - 2j * np.pi * z) * t
        assert abs(e(z + tau) - rhs) <= 1e-12 * max(1, abs(rhs))
        assert abs(e(-z) + t) <= 1e-12 * max(1, abs(t))


def test_independent_series_at_half():
    e = ThetaEngine(1j)
    assert abs(e(0.5) - independent_series(0.5, 1j)) < 1e-9
    assert abs(e(0.5) - e.theta_product(0.5)) < 1e-12


def test_germ_at_origin(engine):
    g = engine.theta_germ(0, 6).values
    assert np.allclose(g[:2], [0, 1], atol=1e-14)
    assert np.allclose(g[[2, 4, 6]], 0, atol=1e-12)


def test_germ_finite_differences(engine, rng):
    h = 1e-5
    for z in fd_points(rng, 5):
        g = engine.theta_germ(z, 1).values
        d1 = (engine(z + h) - engine(z - h)) / (2 * h)
        assert abs(d1 - g[1]) <= 1e-7 * max(1, abs(g[1]))


def test_rho_symmetries(engine, rng):
    for z in fd_points(rng, 20):
        if lattice_distance(z, engine.tau) < 0.05:
            continue
        assert abs(engine.rho(-z) + engine.rho(z)) < 1e-12 * max(1, abs(engine.rho(z)))
        assert abs(engine.rho(z + 1) - engine.rho(z)) < 1e-12 * max(1, abs(engine.rho(z)))


@pytest.mark.parametrize("r", [1e-2, 1e-3])
def test_rho_simple_pole(engine, r):
    z = r * np.exp(0.4j)
    # theta(z) = z + c3 z^3 + ..., so rho(z) - 1/z = O(z)
    assert abs(engine.rho(z) - 1 / z) < 10 * r


def test_pole_guard(engine):
    with pytest.raises(PoleError):
        engine.rho(1 + engine.tau)


def test_rejects_lower_half_plane():
    with pytest.raises(ConfigurationError):
        ThetaEngine(0.2 - 1j)


def test_derivative_cap(engine):
    with pytest.raises(ConfigurationError):
        engine.theta_taylor(0.1, engine.max_derivative + 1)
