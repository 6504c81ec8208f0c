import numpy as np
import pytest

from eqg.errors import ConfigurationError, DynamicalPoleError
from eqg.rmatrix import (DYBE_SHIFT_SIGN, RFamily, classical_r_image, dybe_sides,
                         dynamical_apply, reversed_dybe_sides, fundamental_L, gauge_L,
                         gauge_transform, off_scalar_residual, quantum_determinant, rll_sides,
                         solve_phi)
from eqg.verify import scaled_residual

from conftest import HBAR

Z, LAM = 0.23 + 0.31j, 0.31 + 0.22j
Z1, Z2, Z3 = 0.41 + 0.13j, -0.17 + 0.52j, 0.05 - 0.33j
SIX = {(0, 0), (3, 3), (1, 1), (2, 2), (1, 2), (2, 1)}


@pytest.mark.parametrize("variant", ["plus", "minus", "bar"])
def test_order_zero_is_identity(engine, variant):
    R = RFamily(variant, engine, 3).matrix(Z, LAM)
    assert np.allclose(R[..., 0], np.eye(4), atol=1e-14)


@pytest.mark.parametrize("variant", ["plus", "minus", "bar"])
def test_six_term_pattern_and_weight(engine, variant):
    R = RFamily(variant, engine, 3).matrix(Z, LAM)
    for i in range(4):
        for j in range(4):
            if (i, j) not in SIX:
                assert np.all(R[i, j] == 0)
    assert RFamily(variant, engine, 3).build(Z, LAM).total_weight_commutator() == 0


def test_lower_diagonal_entry(engine):
    R = RFamily("plus", engine, HBAR).matrix(Z, LAM)
    assert R[2, 2] == pytest.approx(engine(Z) / engine(Z + HBAR))


def test_dynamical_pole(engine):
    with pytest.raises(DynamicalPoleError):
        RFamily("plus", engine, HBAR).matrix(Z, 0)


def test_dynamical_apply_sectors(engine):
    fam = RFamily("plus", engine, HBAR)
    op = dynamical_apply(lambda mu: fam(Z, LAM, mu), 3, (1, 2), (0,))
    # slot 0 in state v_1 (index 0) uses lambda + hbar, v_-1 uses lambda - hbar
    up, down = op.entries[:4, :4], op.entries[4:, 4:]
    assert np.allclose(up, fam(Z, LAM, 1))
    assert np.allclose(down, fam(Z, LAM, -1))
    assert np.all(op.entries[:4, 4:] == 0)
    plain = dynamical_apply(lambda mu: fam(Z, LAM, mu), 3, (1, 2))
    assert np.allclose(plain.entries[:4, :4], fam(Z, LAM))
    with pytest.raises(ConfigurationError):
        dynamical_apply(lambda mu: fam(Z, LAM, mu), 3, (1, 2), (1,))


def test_dynamical_apply_is_linear(engine):
    fam = RFamily("plus", engine, HBAR)
    op = dynamical_apply(lambda mu: fam(Z, LAM, mu), 3, (0, 1), (2,)).entries
    v1, v2 = np.zeros(8), np.zeros(8)
    v1[2], v2[5] = 1, 1
    assert np.allclose(op @ (v1 + 2 * v2), op @ v1 + 2 * op @ v2)


@pytest.mark.parametrize("variant", ["plus", "minus", "bar"])
@pytest.mark.parametrize("hbar", [HBAR, 3])
def test_dybe(engine, variant, hbar):
    fam = RFamily(variant, engine, hbar)
    lhs, rhs = dybe_sides(fam, Z1, Z2, Z3, LAM, DYBE_SHIFT_SIGN[variant])
    assert scaled_residual(lhs.entries, rhs.entries) < 1e-9


@pytest.mark.parametrize("variant", ["plus", "bar"])
def test_dybe_reversed_ordering(engine, variant):
    fam = RFamily(variant, engine, HBAR)
    lhs, rhs = reversed_dybe_sides(fam, Z1, Z2, Z3, LAM, 1)
    assert scaled_residual(lhs.entries, rhs.entries) < 1e-9
    # the other shift sign is genuinely different
    lhs, rhs = dybe_sides(fam, Z1, Z2, Z3, LAM, 1)
    assert scaled_residual(lhs.entries, rhs.entries) > 1e-3


@pytest.mark.parametrize("hbar", [HBAR, 3])
def test_rll(engine, hbar):
    lhs, rhs = rll_sides(RFamily("plus", engine, hbar), fundamental_L(engine, hbar, Z3), Z1, Z2, LAM)
    assert scaled_residual(lhs.entries, rhs.entries) < 1e-9


def test_gauged_rll(engine):
    base = fundamental_L(engine, 3, Z3)
    L = lambda z, l, c=0: gauge_L(base(z, l, c), l, engine, 3, c=c)  # noqa: E731
    lhs, rhs = rll_sides(RFamily("bar", engine, 3), L, Z1, Z2, LAM)
    assert scaled_residual(lhs.entries, rhs.entries) < 1e-8


def test_determinant(engine):
    triv = quantum_determinant(lambda z, l, c=0: np.eye(4, dtype=complex), engine, HBAR, Z1, LAM)
    assert np.allclose(triv, np.eye(2))
    D = quantum_determinant(fundamental_L(engine, HBAR, Z3), engine, HBAR, Z1, LAM)
    off, s = off_scalar_residual(D)
    assert off < 1e-9
    assert s == pytest.approx(engine(Z1 - Z3 - HBAR) / engine(Z1 - Z3))
    with pytest.raises(ConfigurationError):
        quantum_determinant(fundamental_L(engine, 3, Z3), engine, 3, Z1, LAM)


def test_classical_limit(engine):
    z, w = 0.3 + 0.2j, -0.1 + 0.05j
    R = RFamily("plus", engine, 2).matrix(z - w, LAM)
    r = classical_r_image(engine, z, w, LAM)
    d = R[..., 1] - r
    assert np.max(np.abs(d - np.diag(np.diag(d)))) < 1e-10
    assert np.allclose(np.diag(d), -engine.rho(z - w) / 2, atol=1e-10)
    assert r[1, 2] == pytest.approx(engine(z - w + LAM) / (engine(z - w) * engine(LAM)))
    # the rho part flips sign under z <-> w with the slot swap
    rs = classical_r_image(engine, w, z, LAM)
    assert rs[0, 0] == pytest.approx(-r[0, 0])


def test_phi(engine):
    phi = solve_phi(engine, LAM, 3)
    assert phi.functional_residual().max() < 1e-9
    assert phi.log_phi_derivative_jet().coeffs[0] == pytest.approx(engine.rho(LAM) / 2)
    assert np.allclose(phi.symbol.coeffs[:4], [0.5, 0.25, 0, -1 / 48])


def test_phi_constant_drops_out(engine):
    fam = RFamily("bar", engine, 3)
    a = gauge_transform(fam, Z, LAM, 0, solve_phi(engine, LAM, 3))
    b = gauge_transform(fam, Z, LAM, 0, solve_phi(engine, LAM, 3, basepoint=0.4 + 0.3j))
    assert np.allclose(a, b, atol=1e-13)


def test_gauge_keeps_diagonal(engine):
    a = RFamily("bar", engine, 3)(Z, LAM)
    b = RFamily("plus", engine, 3)(Z, LAM)
    assert np.allclose(a[[0, 3], [0, 3]], b[[0, 3], [0, 3]])


def test_numeric_gauge_matches_jet(engine):
    jet = RFamily("bar", engine, 6).matrix(Z, LAM)
    num = RFamily("bar", engine, 1e-3).matrix(Z, LAM)
    series = sum(jet[..., k] * 1e-3**k for k in range(7))
    assert np.allclose(num, series, atol=1e-12)
