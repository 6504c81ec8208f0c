import numpy as np
import pytest

from eqg import evaluation as ev
from eqg.errors import ConfigurationError, DomainError
from eqg.jets import HbarJet, PointGerm, jet_matmul
from eqg.spaces import build_dual_pair
from eqg.verify import scaled_residual

M = 3
LAM = 0.31 + 0.22j


@pytest.fixture
def cfg(engine):
    return ev.RepConfig(engine, 0.12 + 0.05j, M)


def test_generators(cfg, engine):
    assert np.all(ev.rep_generator_image("K", cfg).entries == 0)
    e = ev.rep_generator_image("e[eps]", cfg, 2.0)
    assert e.kind == "e" and e.matrix_part.tolist() == [[0, 1], [0, 0]]
    c = ev.theta_hbar_over_hbar(engine, M).coeffs
    assert np.allclose(e.entries[0, 1], 2 * c)
    assert abs(c[0] - 1) < 1e-14 and abs(c[1]) < 1e-14
    f = ev.rep_generator_image("f[eps]", cfg, 1.0)
    assert f.matrix_part.tolist() == [[0, 0], [1, 0]]
    h = ev.rep_generator_image("h[r]", cfg, PointGerm(np.r_[1.0, np.zeros(M)]))
    assert np.allclose(h.entries[..., 0], np.diag([1, -1]))
    assert np.allclose(h.entries[..., 1:], 0)


def test_central_charge_is_zero(engine):
    with pytest.raises(ConfigurationError):
        ev.RepConfig(engine, 0.1, M, K_central=1)


def test_fields_start_at_identity(cfg):
    for field, z in (("K+", 0.5 + 0.1j), ("k+", 0.5 + 0.1j), ("K-", 0.02 - 0.03j)):
        assert np.allclose(ev.current_field_image(field, z, cfg).entries[..., 0], np.eye(2))


def test_field_domain(cfg):
    with pytest.raises(DomainError):
        ev.current_field_image("K+", 0.05, cfg)
    ev.current_field_image("K+", 0.05, cfg, continuation=True)


@pytest.mark.parametrize("sign,z", [("+", 0.5 + 0.1j), ("-", 0.02 - 0.03j)])
def test_rel_k(cfg, sign, z):
    K = ev.current_field_image(f"K{sign}", z, cfg).entries
    k0 = ev.current_field_image(f"k{sign}", z, cfg).entries
    k1 = ev.current_field_image(f"k{sign}", z, cfg, -1).entries
    assert scaled_residual(K, jet_matmul(k0, k1)) < 1e-10


def test_closed_forms(cfg):
    for field, z in (("K+", 0.5 + 0.1j), ("K-", 0.02 - 0.03j)):
        a = ev.current_field_image(field, z, cfg).entries
        b = ev.closed_form_field(field, z, cfg).entries
        assert scaled_residual(a, b) < 1e-12


def test_conjugation_ratio(cfg, engine):
    z = 0.5 + 0.1j
    K = ev.current_field_image("K+", z, cfg).entries
    x = z - cfg.zeta
    ratio = HbarJet(K[0, 0]) / HbarJet(K[1, 1])
    assert np.allclose(ratio.coeffs, engine.ratio_jet(x, 1, x, -1, M).coeffs, atol=1e-12)


def test_h_plus_truncated_sum(engine):
    cfg = ev.RepConfig(engine, 0.1 - 0.04j, M)
    p0 = build_dual_pair(engine, 0, 40)
    z = 0.45 + 0.05j
    a = ev.current_field_image("h+", z, cfg).entries
    b = ev.h_plus_truncated_sum(p0, z, cfg).entries
    assert scaled_residual(a, b) < 1e-8


def test_half_current_shape(cfg):
    img = ev.half_current_image("e", 1, LAM, 0.5 + 0.1j, cfg)
    assert img.matrix_part.tolist() == [[0, 1], [0, 0]]
    with pytest.raises(DomainError):
        ev.half_current_image("e", -1, LAM, 0.5 + 0.1j, cfg)


def test_L_operators(cfg):
    Lp = ev.build_L_pm_image(1, LAM, 0.5 + 0.1j, cfg)
    assert np.allclose(Lp.matrix[..., 0], np.eye(4), atol=1e-14)
    f = ev.half_current_image("f", 1, LAM, 0.5 + 0.1j, cfg).entries[1, 0]
    th = HbarJet(cfg.engine.theta_jet(0, 1, M).coeffs)
    # the upper-right auxiliary entry at leading order is theta(hbar) f^+
    block = Lp.block(0, 1)[1, 0]
    assert abs(block[1] - (th * HbarJet(f)).coeffs[1]) < 1e-12


@pytest.mark.parametrize("sign,zs", [(1, (0.55 + 0.1j, -0.3 + 0.45j)), (-1, (0.05 + 0.02j, -0.03 + 0.04j))])
def test_Lpm_exchange(engine, sign, zs):
    cfg = ev.RepConfig(engine, 0.3 - 0.1j, M)
    shift = -1 if sign > 0 else 1
    lhs, rhs = ev.lpm_sides(sign, LAM, zs[0], zs[1], cfg, shift)
    assert scaled_residual(lhs.entries, rhs.entries) < 1e-8


def test_mixed_exchange(engine):
    cfg = ev.RepConfig(engine, 0.3 - 0.1j, M)
    lhs, rhs = ev.lplus_lminus_sides(LAM, 0.05 + 0.02j, -0.5 + 0.3j, cfg)
    assert scaled_residual(lhs.entries, rhs.entries) < 1e-8


def test_a_factor(engine):
    cfg = ev.RepConfig(engine, 0, M)
    z, zp = 0.1 + 0.05j, -0.4 + 0.2j
    a = ev.a_factor(z, zp, cfg)
    assert a.coeffs[0] == pytest.approx(1)
    assert a.coeffs[1] == pytest.approx(engine.rho(zp - z) / 2)
    b = ev.a_factor_truncated(build_dual_pair(engine, 0, 40), z, zp, M)
    assert np.max(np.abs(a.coeffs - b.coeffs)) < 1e-7
    with pytest.raises(DomainError):
        ev.a_factor(zp, z, cfg)


def test_two_point_rep(engine):
    rep = ev.TwoPointRep(engine, 0.4 + 0.1j, 0.1 - 0.1j, M)
    E = rep.e_image(lambda p: 1.0)[..., 0]
    expected = np.zeros((4, 4))
    expected[0, 2] = expected[1, 3] = expected[0, 1] = expected[2, 3] = 1
    assert np.allclose(E, expected)
    with pytest.raises(DomainError):
        ev.TwoPointRep(engine, 0.1, 0.4, M)


@pytest.mark.parametrize("x", ["e", "f"])
@pytest.mark.parametrize("eps,eps_p", [(1, 1), (1, -1), (-1, 1), (-1, -1)])
def test_half_current_exchange(engine, x, eps, eps_p):
    rep = ev.TwoPointRep(engine, 0.41 + 0.13j, 0.12 - 0.05j, M)
    lhs, rhs = ev.half_current_exchange(rep, x, eps, eps_p, LAM, 0.63 + 0.2j, -0.35 + 0.4j)
    assert scaled_residual(lhs, rhs) < 1e-8


def test_variant_reading_fails_on_mixed_signs(engine):
    rep = ev.TwoPointRep(engine, 0.41 + 0.13j, 0.12 - 0.05j, M)
    lhs, rhs = ev.half_current_exchange(rep, "e", 1, -1, LAM, 0.63 + 0.2j, -0.35 + 0.4j, "variant")
    assert scaled_residual(lhs, rhs) > 1e-3
