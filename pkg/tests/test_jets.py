import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqg.errors import ConfigurationError, SingularJetError
from eqg.jets import (DiffOpSymbol, HbarJet, PointGerm, diffop_apply, jet_exponential,
                      jet_invert, jet_matmul, jet_multiply)

M = 4


def brute_product(a, b):
    out = np.zeros(len(a), dtype=complex)
    for i in range(len(a)):
        for j in range(len(b)):
            if i + j < len(a):
                out[i + j] += a[i] * b[j]
    return out


small = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
jets = st.lists(st.tuples(small, small), min_size=M + 1, max_size=M + 1).map(
    lambda xs: HbarJet([complex(a, b) for a, b in xs]))


def test_identity_times_identity():
    one = HbarJet([1, 0])
    assert np.allclose(jet_multiply(one, one).coeffs, [1, 0])


def test_hbar_squared_truncates():
    h = HbarJet.hbar(1)
    assert np.allclose((h * h).coeffs, 0)


def test_exp_inverse_pair():
    h = HbarJet.hbar(M)
    assert np.allclose((h.exp() * (-h).exp()).coeffs, HbarJet.constant(1, M).coeffs, atol=1e-15)


def test_exp_taylor_coefficients():
    assert np.allclose(jet_exponential(HbarJet.hbar(3)).coeffs, [1, 1, 1 / 2, 1 / 6])
    assert np.allclose(HbarJet.zero(3).exp().coeffs, [1, 0, 0, 0])


def test_geometric_inverse():
    a = HbarJet.constant(1, M) + HbarJet.hbar(M)
    assert np.allclose(jet_invert(a).coeffs, [1, -1, 1, -1, 1])
    assert np.allclose(jet_invert(HbarJet.constant(1, M)).coeffs, HbarJet.constant(1, M).coeffs)


def test_invert_exp():
    h = HbarJet.hbar(M)
    assert np.max(np.abs(jet_invert(h.exp()).coeffs - (-h).exp().coeffs)) < 1e-13


def test_singular_inverse_raises():
    with pytest.raises(SingularJetError):
        jet_invert(HbarJet.hbar(M))


def test_order_mismatch_raises():
    with pytest.raises(ConfigurationError):
        HbarJet.hbar(2) + HbarJet.hbar(3)


@settings(max_examples=50, deadline=None)
@given(jets, jets)
def test_product_matches_convolution(a, b):
    assert np.allclose((a * b).coeffs, brute_product(a.coeffs, b.coeffs), rtol=1e-13, atol=1e-13)


@settings(max_examples=50, deadline=None)
@given(jets, jets, jets)
def test_ring_axioms(a, b, c):
    assert np.allclose(((a * b) * c).coeffs, (a * (b * c)).coeffs, rtol=1e-13, atol=1e-12)
    assert np.allclose((a * (b + c)).coeffs, (a * b + a * c).coeffs, rtol=1e-13, atol=1e-12)
    assert np.allclose((a * b).coeffs, (b * a).coeffs, rtol=1e-13, atol=1e-13)


@settings(max_examples=50, deadline=None)
@given(jets, jets)
def test_exp_is_a_homomorphism(a, b):
    # only the nilpotent part is exponentiated exactly; keep constants small
    a = a * 0.3
    b = b * 0.3
    lhs = (a + b).exp().coeffs
    rhs = (a.exp() * b.exp()).coeffs
    assert np.max(np.abs(lhs - rhs)) / max(1, np.max(np.abs(lhs))) < 1e-13


def test_symbol_on_constant_germ():
    one = DiffOpSymbol.constant(1, M)
    q = DiffOpSymbol.exp_shift(1, M)
    g = (2 / (one + q)).truncate(M)
    germ = PointGerm(np.r_[1.0, np.zeros(M)])
    assert np.allclose(diffop_apply(g, germ).coeffs, [1, 0, 0, 0, 0])


def test_shift_symbol_on_linear_germ():
    germ = PointGerm(np.r_[1.0, 1.0, np.zeros(M - 1)], 1.0)  # f(z) = z at z = 1
    assert np.allclose(diffop_apply(DiffOpSymbol.exp_shift(1, M), germ).coeffs, [1, 1, 0, 0, 0])


def test_sinh_symbol_matches_central_difference(engine):
    z = 0.21 - 0.13j
    q, qi = DiffOpSymbol.exp_shift(1, M + 1), DiffOpSymbol.exp_shift(-1, M + 1)
    g = ((q - qi) * 0.5).div_u()
    # sinh(hbar d)/(hbar d) applied to theta' is the central difference of theta
    dtheta = PointGerm(engine.theta_germ(z, M + 1).values[1:], z)
    lhs = diffop_apply(g.truncate(M), dtheta).coeffs
    plus, minus = engine.theta_jet(z, 1, M + 1), engine.theta_jet(z, -1, M + 1)
    rhs = ((plus - minus) * 0.5).div_hbar().coeffs
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_diffop_is_linear(engine):
    g = DiffOpSymbol.exp_shift(0.7, M)
    h = DiffOpSymbol.exp_shift(-0.2, M)
    f1, f2 = engine.theta_germ(0.1 + 0.2j, M), engine.rho_germ(0.1 + 0.2j, M)
    lhs = diffop_apply(g + h, f1 + 2 * f2).coeffs
    rhs = (diffop_apply(g, f1) + diffop_apply(h, f1) + 2 * diffop_apply(g, f2)
           + 2 * diffop_apply(h, f2)).coeffs
    assert np.allclose(lhs, rhs, atol=1e-13)


def test_reciprocal_symbol_inverts_the_jet():
    germ = PointGerm(np.r_[1.0, np.zeros(M)])
    g = DiffOpSymbol.exp_shift(0.5, M) + 1
    applied = diffop_apply(g, germ)
    assert np.max(np.abs(jet_invert(applied).coeffs - diffop_apply(g.reciprocal(), germ).coeffs)) < 1e-12


def test_germ_too_short_raises():
    with pytest.raises(ConfigurationError):
        diffop_apply(DiffOpSymbol.exp_shift(1, M), PointGerm(np.ones(2)))


def test_jet_matmul_matches_scalar_product():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(2, 2, M + 1)) + 0j
    b = rng.normal(size=(2, 2, M + 1)) + 0j
    out = jet_matmul(a, b)
    ref = brute_product(a[0, 0], b[0, 0]) + brute_product(a[0, 1], b[1, 0])
    assert np.allclose(out[0, 0], ref)
