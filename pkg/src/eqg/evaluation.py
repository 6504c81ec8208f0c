"""Evaluation representation pi_zeta of the current algebra at K = 0.

Every field image is a 2x2 matrix of hbar-jets.  Fields of h-type are built
from the expansion kernels of the dual bases: with ``x = z - zeta``

    sum_i e^i(zeta) ẽ_{i;0}(z) = rho(x) + c0        (|zeta| < |z|)
    sum_i ẽ_{i;0}(zeta) e^i(z) = -rho(x) + c0       (|z| < |zeta|)

and operator symbols g(hbar d_zeta) act on them as g(-hbar d_x).  The
exponentials K^±, k^± are jet exponentials of those images, so their closed
forms (theta ratios) are independent cross-checks rather than inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import ConfigurationError, DomainError
from .jets import DiffOpSymbol, HbarJet, PointGerm, diffop_apply, jet_identity, jet_matmul
from .rmatrix import RFamily, dynamical_apply
from .spaces import DualBasisPair
from .theta import ThetaEngine, lattice_distance

E11, E22 = (0, 0), (1, 1)
E_UP, E_DOWN = (0, 1), (1, 0)   # E_{1,-1} and E_{-1,1}

PLUS_FIELDS = ("h+", "K+", "k+")
MINUS_FIELDS = ("h-", "K-", "k-")


@dataclass(frozen=True)
class RepConfig:
    """Evaluation point and truncation data; the central charge is always 0."""

    engine: ThetaEngine
    zeta: complex
    jet_order: int = 3
    trunc_N: int = 40
    K_central: int = 0
    l0_constant: complex = 0j

    def __post_init__(self):
        if self.K_central != 0:
            raise ConfigurationError("the evaluation representation has K = 0")
        if self.jet_order < 1:
            raise ConfigurationError("jet_order must be at least 1")
        object.__setattr__(self, "zeta", complex(self.zeta))

    @property
    def eta(self) -> HbarJet:
        return HbarJet.hbar(self.jet_order) * 0.5

    def at(self, zeta) -> "RepConfig":
        return RepConfig(self.engine, zeta, self.jet_order, self.trunc_N, 0, self.l0_constant)


@dataclass
class CurrentImage:
    """2x2 jet matrix with its kind: ``diag``, ``e`` (upper), ``f`` (lower), ``zero`` or ``derivation``."""

    kind: str
    entries: np.ndarray

    @property
    def matrix_part(self) -> np.ndarray:
        """0/1 support pattern of the matrix."""
        return (np.abs(self.entries).max(axis=-1) > 0).astype(int)

    def diagonal(self) -> tuple[HbarJet, HbarJet]:
        return HbarJet(self.entries[0, 0]), HbarJet(self.entries[1, 1])

    def coefficient(self, k):
        return self.entries[..., k]


# ---------------------------------------------------------------------------
# operator symbols (all built from exp_shift; no closed forms)
# ---------------------------------------------------------------------------

def _reflect(s: DiffOpSymbol) -> DiffOpSymbol:
    """g(u) -> g(-u)."""
    return DiffOpSymbol(s.coeffs * (-1.0) ** np.arange(s.coeffs.size))


class Symbols:
    """Symbols at jet order M, expressed in the variable ``u = hbar d_zeta``."""

    def __init__(self, M: int):
        n = M + 1
        q = DiffOpSymbol.exp_shift(1, n)
        qi = DiffOpSymbol.exp_shift(-1, n)
        one = DiffOpSymbol.constant(1, n)
        self.M = M
        self.two_over_1pq = (2 / (one + q)).truncate(M)
        self.two_over_1pqi = (2 / (one + qi)).truncate(M)
        self.one_m_qi_over_u = (one - qi).div_u()
        self.q_m_one_over_u = (q - one).div_u()
        self.sinh_over_u = ((q - qi) * 0.5).div_u()
        self.half_q_m_one_over_u = ((q - one) * 0.5).div_u()
        self.one_over_1pqi = (1 / (one + qi)).truncate(M)
        self.tanh_half_over_u = ((q - one) / (q + one)).div_u()

    def shift(self, a) -> DiffOpSymbol:
        return DiffOpSymbol.exp_shift(a, self.M)


@lru_cache(maxsize=None)
def _symbols(M):
    return Symbols(M)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def theta_hbar_over_hbar(engine: ThetaEngine, M: int) -> HbarJet:
    """theta(hbar)/hbar = 1 + O(hbar^2)."""
    return engine.theta_jet(0, 1, M + 1).div_hbar()


def rep_generator_image(gen: str, cfg: RepConfig, arg=None) -> CurrentImage:
    """Image of ``K``, ``D``, ``h[r]``, ``h[lambda]``, ``e[eps]`` or ``f[eps]``.

    ``arg`` is a :class:`PointGerm` at zeta for the h-generators and the value
    ``eps(zeta)`` (complex or jet) for e and f.
    """
    M = cfg.jet_order
    out = np.zeros((2, 2, M + 1), dtype=complex)
    if gen == "K":
        return CurrentImage("zero", out)
    if gen == "D":
        # acts as the identity on C^2 tensored with d/dzeta on the coefficients
        return CurrentImage("derivation", jet_identity(2, M))
    s = _symbols(M)
    if gen in ("h[r]", "h[lambda]"):
        if not isinstance(arg, PointGerm):
            raise ConfigurationError(f"{gen} needs a PointGerm argument")
        g1, g2 = ((s.two_over_1pq, s.two_over_1pqi) if gen == "h[r]"
                  else (s.one_m_qi_over_u, s.q_m_one_over_u))
        out[0, 0] = diffop_apply(g1, arg).coeffs
        out[1, 1] = -diffop_apply(g2, arg).coeffs
        return CurrentImage("diag", out)
    val = arg if isinstance(arg, HbarJet) else HbarJet.constant(complex(arg), M)
    if gen == "e[eps]":
        out[E_UP] = (theta_hbar_over_hbar(cfg.engine, M) * val).coeffs
        return CurrentImage("e", out)
    if gen == "f[eps]":
        out[E_DOWN] = val.coeffs
        return CurrentImage("f", out)
    raise ValueError(f"unknown generator {gen!r}")


# ---------------------------------------------------------------------------
# current fields
# ---------------------------------------------------------------------------

def _check_domain(z, cfg: RepConfig, inside: bool, continuation: bool, what: str):
    """``inside``: the expansion needs |zeta| < |z|; otherwise |z| < |zeta|."""
    cfg.engine.check_pole(z - cfg.zeta, f"{what}: z - zeta")
    if continuation:
        return
    small, big = (cfg.zeta, z) if inside else (z, cfg.zeta)
    if abs(small) >= lattice_distance(big, cfg.engine.tau) or abs(small) >= abs(big):
        raise DomainError(f"{what} at z={z}: outside the convergence region of its expansion")


def _kernel_germ(cfg: RepConfig, x, plus: bool) -> PointGerm:
    M = cfg.jet_order
    rho = cfg.engine.rho_germ(x, M)
    const = np.zeros(M + 1, dtype=complex)
    const[0] = cfg.l0_constant
    return (rho if plus else -1 * rho) + PointGerm(const, complex(x))


def _h_symbols(s: Symbols, plus: bool):
    if plus:
        return s.two_over_1pq, -s.two_over_1pqi
    return s.one_m_qi_over_u, -s.q_m_one_over_u


def current_field_image(field: str, z: complex, cfg: RepConfig, shift: float = 0,
                        continuation: bool = False) -> CurrentImage:
    """Image of ``h±, K±, k±`` at ``z + shift*hbar``."""
    plus = field in PLUS_FIELDS
    if field not in PLUS_FIELDS + MINUS_FIELDS:
        raise ValueError(f"unknown field {field!r}")
    z = complex(z)
    _check_domain(z, cfg, plus, continuation, field)
    M = cfg.jet_order
    s = _symbols(M)
    germ = _kernel_germ(cfg, z - cfg.zeta, plus)
    pre = {"h+": None, "h-": None,
           "K+": s.sinh_over_u, "K-": DiffOpSymbol.constant(1, M),
           "k+": s.half_q_m_one_over_u, "k-": s.one_over_1pqi}[field]
    out = np.zeros((2, 2, M + 1), dtype=complex)
    for idx, g in zip((E11, E22), _h_symbols(s, plus)):
        # generator symbols act on zeta (reflected into d_x); the exponent
        # symbols and the shift f(z + a hbar) act on z = x + zeta directly
        sym = _reflect(g) * s.shift(shift)
        if pre is not None:
            sym = pre * sym
        val = diffop_apply(sym, germ)
        if pre is not None:
            val = val.times_hbar().exp()
        out[idx] = val.coeffs
    return CurrentImage("diag", out)


def closed_form_field(field: str, z: complex, cfg: RepConfig, shift: float = 0) -> CurrentImage:
    """Theta-ratio forms of K±(z + shift hbar); used as an oracle."""
    M, eng = cfg.jet_order, cfg.engine
    x = complex(z) - cfg.zeta
    r = lambda a, b: eng.ratio_jet(x, shift + a, x, shift + b, M)  # noqa: E731
    out = np.zeros((2, 2, M + 1), dtype=complex)
    if field == "K+":
        out[E11], out[E22] = r(1, 0).coeffs, r(-1, 0).coeffs
    elif field == "K-":
        out[E11], out[E22] = r(0, 1).coeffs, r(0, -1).coeffs
    else:
        raise ValueError("closed forms are available for K+ and K- only")
    return CurrentImage("diag", out)


def h_plus_truncated_sum(pair0: DualBasisPair, z: complex, cfg: RepConfig) -> CurrentImage:
    """h+(z) = sum_i pi(h[e^i]) ẽ_{i;0}(z), truncated at the pair size."""
    M = cfg.jet_order
    s = _symbols(M)
    dual = pair0.dual_values(z)
    N = pair0.N
    out = np.zeros((2, 2, M + 1), dtype=complex)
    for idx, g in zip((E11, E22), (s.two_over_1pq, -s.two_over_1pqi)):
        for k in range(M + 1):
            # g_k hbar^k d^k e^i = g_k hbar^k e^{i-k}
            tot = sum(cfg.zeta ** (i - k) / factorial(i - k) * dual[i] for i in range(k, N))
            out[idx + (k,)] = g.coeffs[k] * tot
    return CurrentImage("diag", out)


# ---------------------------------------------------------------------------
# half-currents and kernels
# ---------------------------------------------------------------------------

def omega_jet(engine: ThetaEngine, lam: complex, c: float, z: complex, w: complex, M: int) -> HbarJet:
    """Jet of ``omega_{lam + c hbar}(z, w) = theta(z-w+lam')/(theta(z-w) theta(lam'))``."""
    x = complex(z) - complex(w)
    engine.check_pole(x, "z - w")
    engine.check_pole(lam, "lambda")
    return engine.theta_jet(x + lam, c, M) / (engine(x) * engine.theta_jet(lam, c, M))


def half_current_image(x: str, sign: int, lam: complex, z: complex, cfg: RepConfig,
                       lam_shift: float = 0, continuation: bool = False) -> CurrentImage:
    """``x^±_{lam + lam_shift*hbar}(z)`` for ``x`` in {e, f}.

    ``x^+`` needs |zeta| < |z| and ``x^-`` needs |z| < |zeta| unless
    ``continuation`` is set, in which case the common closed form is used.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    _check_domain(complex(z), cfg, sign > 0, continuation, f"{x}{'+' if sign > 0 else '-'}")
    M = cfg.jet_order
    val = omega_jet(cfg.engine, lam, lam_shift, z, cfg.zeta, M) * sign
    if x == "e":
        return rep_generator_image("e[eps]", cfg, val)
    if x == "f":
        return rep_generator_image("f[eps]", cfg, val)
    raise ValueError(f"unknown half-current {x!r}")


# ---------------------------------------------------------------------------
# L-operators
# ---------------------------------------------------------------------------

@dataclass
class LOperatorImage:
    """``L^±_lam(zeta)`` on auxiliary ⊗ quantum; entries are jets."""

    sign: int
    lam: complex
    zeta_spectral: complex
    w_eval: complex
    matrix: np.ndarray

    def block(self, a: int, b: int) -> np.ndarray:
        """Quantum-space 2x2 jet matrix in auxiliary entry (a, b)."""
        return self.matrix.reshape(2, 2, 2, 2, -1)[a, :, b, :]


def _aux(entries: dict, M: int) -> np.ndarray:
    """4x4 jet matrix from {(aux_row, aux_col): 2x2 quantum jet matrix}."""
    out = np.zeros((4, 4, M + 1), dtype=complex)
    for (a, b), q in entries.items():
        out[2 * a:2 * a + 2, 2 * b:2 * b + 2] = q
    return out


def build_L_pm_image(sign: int, lam: complex, zeta: complex, cfg: RepConfig,
                     lam_shift: float = 0, continuation: bool = False) -> LOperatorImage:
    """Triangular product for ``L^±_{lam + lam_shift hbar}(zeta)`` in the representation at ``cfg.zeta``.

    The f-subscript ``lam + hbar h - hbar`` is read on the input quantum weight;
    f only acts on weight +1, where it equals ``lam``.
    """
    M, eng = cfg.jet_order, cfg.engine
    th = eng.theta_jet(0, 1, M)
    one = jet_identity(2, M)
    plus = sign > 0
    kfield = "k+" if plus else "k-"
    k_prev = current_field_image(kfield, zeta, cfg, -1, continuation)
    k_here = current_field_image(kfield, zeta, cfg, 0, continuation)
    d1 = k_prev.entries
    d2 = np.stack([np.diag([(1 / HbarJet(k_here.entries[i, i])).coeffs[k] for i in (0, 1)])
                   for k in range(M + 1)], axis=-1)
    s = 1 if plus else -1
    f = half_current_image("f", s, lam, zeta, cfg, lam_shift, continuation).entries
    e = half_current_image("e", s, -lam, zeta, cfg, -lam_shift, continuation).entries
    hb = HbarJet.hbar(M)
    f_term = np.stack([(th * HbarJet(f[E_DOWN])).coeffs if (i, j) == E_DOWN else np.zeros(M + 1)
                       for i in (0, 1) for j in (0, 1)]).reshape(2, 2, M + 1)
    e_term = np.stack([(hb * HbarJet(e[E_UP])).coeffs if (i, j) == E_UP else np.zeros(M + 1)
                       for i in (0, 1) for j in (0, 1)]).reshape(2, 2, M + 1)
    upper = _aux({(0, 0): one, (1, 1): one, (0, 1): f_term}, M)
    lower = _aux({(0, 0): one, (1, 1): one, (1, 0): e_term}, M)
    diag = _aux({(0, 0): d1, (1, 1): d2}, M)
    mat = jet_matmul(jet_matmul(upper, diag), lower) if plus else jet_matmul(jet_matmul(lower, diag), upper)
    return LOperatorImage(sign, complex(lam), complex(zeta), cfg.zeta, mat)


# ---------------------------------------------------------------------------
# A(zeta, zeta') and the image of the universal R-matrix
# ---------------------------------------------------------------------------

def a_factor(zeta: complex, zeta_p: complex, cfg: RepConfig, continuation: bool = False) -> HbarJet:
    """``A(zeta, zeta')``: exp of hbar tanh(u/2)/u applied to the L_0 kernel rho(zeta'-zeta) + c0."""
    zeta, zeta_p = complex(zeta), complex(zeta_p)
    eng = cfg.engine
    eng.check_pole(zeta_p - zeta, "zeta' - zeta")
    if not continuation and abs(zeta) >= min(abs(zeta_p), lattice_distance(zeta_p, eng.tau)):
        raise DomainError("A(zeta, zeta') needs |zeta| < |zeta'|")
    M = cfg.jet_order
    s = _symbols(M)
    germ = _kernel_germ(cfg.at(zeta), zeta_p - zeta, True)
    return diffop_apply(_reflect(s.tanh_half_over_u), germ).times_hbar().exp()


def a_factor_truncated(pair0: DualBasisPair, zeta: complex, zeta_p: complex, M: int) -> HbarJet:
    """The defining double sum of log A, truncated at the pair size, exponentiated."""
    s = _symbols(M)
    dual = pair0.dual_values(zeta_p)
    log_a = np.zeros(M + 1, dtype=complex)
    for k in range(M):
        tot = sum(zeta ** (i - k) / factorial(i - k) * dual[i] for i in range(k, pair0.N))
        log_a[k + 1] = s.tanh_half_over_u.coeffs[k] * tot
    return HbarJet(log_a).exp()


def adar_rhs(zeta: complex, zeta_p: complex, lam: complex, cfg: RepConfig, c: float = 0,
             continuation: bool = True) -> np.ndarray:
    """``A(zeta, zeta') R^-(zeta - zeta', lam + c hbar)`` as a 4x4 jet matrix."""
    a = a_factor(zeta, zeta_p, cfg, continuation)
    R = RFamily("minus", cfg.engine, cfg.jet_order).matrix(zeta - zeta_p, lam, c)
    return _scale(R, a)


# ---------------------------------------------------------------------------
# two-point representation (pi_zeta1 ⊗ pi_zeta2) ∘ Delta
# ---------------------------------------------------------------------------

def _kron_jet(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of 2x2 jet matrices (truncated Cauchy product)."""
    M = a.shape[-1] - 1
    out = np.zeros((4, 4, M + 1), dtype=complex)
    for k in range(M + 1):
        for j in range(k + 1):
            out[..., k] += np.kron(a[..., j], b[..., k - j])
    return out


class TwoPointRep:
    """Tensor product of evaluation representations at ``zeta1`` and ``zeta2``.

    The coproduct places K^+ of the second factor at zeta1 and K^- of the
    first factor at zeta2; both expansions need ``|zeta2| < |zeta1|``.
    """

    def __init__(self, engine: ThetaEngine, zeta1: complex, zeta2: complex, M: int = 3,
                 l0_constant: complex = 0j):
        zeta1, zeta2 = complex(zeta1), complex(zeta2)
        if abs(zeta2) >= abs(zeta1):
            raise DomainError("the two-point representation needs |zeta2| < |zeta1|")
        self.engine, self.M = engine, M
        self.cfg1 = RepConfig(engine, zeta1, M, l0_constant=l0_constant)
        self.cfg2 = RepConfig(engine, zeta2, M, l0_constant=l0_constant)
        self.zeta1, self.zeta2 = zeta1, zeta2
        self._kp = current_field_image("K+", zeta1, self.cfg2).entries
        km = current_field_image("K-", zeta2, self.cfg1).entries
        self._km_inv = np.zeros_like(km)
        for i in (0, 1):
            self._km_inv[i, i] = (1 / HbarJet(km[i, i])).coeffs
        self._one = jet_identity(2, M)

    def _val(self, v) -> HbarJet:
        return v if isinstance(v, HbarJet) else HbarJet.constant(complex(v), self.M)

    def e_image(self, eps) -> np.ndarray:
        """Delta(e[eps]); ``eps`` maps a point to a complex value or jet."""
        E = np.zeros((2, 2, self.M + 1), dtype=complex)
        E[E_UP + (0,)] = 1
        c = theta_hbar_over_hbar(self.engine, self.M)
        a = _kron_jet(E, self._kp) * 1
        b = _kron_jet(self._one, E)
        return _scale(a, c * self._val(eps(self.zeta1))) + _scale(b, c * self._val(eps(self.zeta2)))

    def f_image(self, eps) -> np.ndarray:
        F = np.zeros((2, 2, self.M + 1), dtype=complex)
        F[E_DOWN + (0,)] = 1
        a = _kron_jet(F, self._one)
        b = _kron_jet(self._km_inv, F)
        return _scale(a, self._val(eps(self.zeta1))) + _scale(b, self._val(eps(self.zeta2)))

    def K_plus_image(self, z: complex, continuation: bool = False) -> np.ndarray:
        """Delta(K^+(z)) = K^+(z) ⊗ K^+(z)."""
        k1 = current_field_image("K+", z, self.cfg1, continuation=continuation).entries
        k2 = current_field_image("K+", z, self.cfg2, continuation=continuation).entries
        return _kron_jet(k1, k2)

    def half_current(self, x: str, sign: int, lam: complex, z: complex, c: float = 0) -> np.ndarray:
        """``x^±_{lam + c hbar}(z)`` through the kernel ``±omega(z, zeta_k)`` (closed form)."""
        ker = lambda p: omega_jet(self.engine, lam, c, z, p, self.M) * sign  # noqa: E731
        return self.e_image(ker) if x == "e" else self.f_image(ker)


def _scale(m: np.ndarray, j: HbarJet) -> np.ndarray:
    out = np.zeros_like(m)
    for k in range(m.shape[-1]):
        for i in range(k + 1):
            out[..., k] += m[..., i] * j.coeffs[k - i]
    return out


def tensor_rep_image(gen: str, zeta1: complex, zeta2: complex, engine: ThetaEngine, M: int = 3,
                     arg=None) -> np.ndarray:
    """Two-point image of ``e[eps]``, ``f[eps]`` (``arg`` = eps) or ``K+(z)`` (``arg`` = z)."""
    rep = TwoPointRep(engine, zeta1, zeta2, M)
    if gen == "e[eps]":
        return rep.e_image(arg)
    if gen == "f[eps]":
        return rep.f_image(arg)
    if gen == "K+":
        return rep.K_plus_image(arg)
    raise ValueError(f"unknown generator {gen!r}")


# ---------------------------------------------------------------------------
# L-operator exchange relations (aux slots 0, 1; quantum slot 2)
# ---------------------------------------------------------------------------

def _L_embed(sign, lam, zeta, cfg, slot, shift_slot=None, shift_sign=1):
    builder = lambda mu: build_L_pm_image(sign, lam, zeta, cfg, mu, True).matrix  # noqa: E731
    if shift_slot is None:
        return dynamical_apply(lambda mu: builder(0), 3, (slot, 2))
    return dynamical_apply(builder, 3, (slot, 2), (shift_slot,), shift_sign)


def lpm_sides(sign: int, lam: complex, zeta: complex, zeta_p: complex, cfg: RepConfig,
              shift_sign: int = 1):
    """Both sides of

    R(zeta-zeta', l) L1_{l + s hbar h2}(zeta) L2_l(zeta')
        = L2_{l + s hbar h1}(zeta') L1_l(zeta) R(zeta-zeta', l + s hbar h)

    with R = R^+ for sign +1 and R^- for sign -1; ``h`` is the quantum weight.
    """
    fam = RFamily("plus" if sign > 0 else "minus", cfg.engine, cfg.jet_order)
    R0 = dynamical_apply(lambda mu: fam(zeta - zeta_p, lam), 3, (0, 1))
    Rh = dynamical_apply(lambda mu: fam(zeta - zeta_p, lam, mu), 3, (0, 1), (2,), shift_sign)
    lhs = R0 @ _L_embed(sign, lam, zeta, cfg, 0, 1, shift_sign) @ _L_embed(sign, lam, zeta_p, cfg, 1)
    rhs = _L_embed(sign, lam, zeta_p, cfg, 1, 0, shift_sign) @ _L_embed(sign, lam, zeta, cfg, 0) @ Rh
    return lhs, rhs


def lplus_lminus_sides(lam: complex, zeta: complex, zeta_p: complex, cfg: RepConfig):
    """Both sides of the mixed relation at K = 0, where the A-ratio is 1:

    L-1_l(zeta) R^-(zeta-zeta', l + hbar h) L+2_l(zeta')
        = L+2_{l + hbar h1}(zeta') R^-(zeta-zeta', l) L-1_{l + hbar h2}(zeta)
    """
    fam = RFamily("minus", cfg.engine, cfg.jet_order)
    R0 = dynamical_apply(lambda mu: fam(zeta - zeta_p, lam), 3, (0, 1))
    Rh = dynamical_apply(lambda mu: fam(zeta - zeta_p, lam, mu), 3, (0, 1), (2,))
    lhs = _L_embed(-1, lam, zeta, cfg, 0) @ Rh @ _L_embed(1, lam, zeta_p, cfg, 1)
    rhs = _L_embed(1, lam, zeta_p, cfg, 1, 0) @ R0 @ _L_embed(-1, lam, zeta, cfg, 0, 1)
    return lhs, rhs


# ---------------------------------------------------------------------------
# half-current exchange relations in the two-point representation
# ---------------------------------------------------------------------------

READINGS = ("literal", "variant")


def half_current_exchange(rep: TwoPointRep, x: str, eps: int, eps_p: int, lam: complex,
                          z: complex, w: complex, reading: str = "literal"):
    """Both sides of the exchange relation for the e- or f-half-currents.

    ``literal`` uses the same-point terms ``x^{eps'}(w) x^{eps'}(w)`` and
    ``x^{eps}(z) x^{eps}(z)``; ``variant`` replaces them by
    ``x^{eps}(w) x^{eps'}(w)`` and ``x^{eps}(z) x^{eps'}(z)``.
    """
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {READINGS}")
    eng, M = rep.engine, rep.M
    th = lambda a, c=0: eng.theta_jet(a, c, M)  # noqa: E731
    x_ = lambda s, c, p: rep.half_current(x, s, lam, p, c)  # noqa: E731
    mm = jet_matmul
    d = complex(z) - complex(w)
    # x = e: shifts (+1, -1) and theta(-hbar); x = f: (-1, +1) and theta(hbar)
    a, b = (1, -1) if x == "e" else (-1, 1)
    coef = HbarJet.constant(1, M) * eps * eps_p
    A = th(d, -a) / eng(d)
    C = th(d, a) / eng(d)
    B = th(-d - lam) * th(0, -a) / (eng(-d) * eng(-lam)) * coef
    D = th(d - lam) * th(0, -a) / (eng(d) * eng(-lam)) * coef
    s_w1, s_z2 = (eps_p, eps) if reading == "literal" else (eps, eps_p)
    lhs = _scale(mm(x_(eps, a, z), x_(eps_p, b, w)), A) + _scale(mm(x_(s_w1, a, w), x_(eps_p, b, w)), B)
    rhs = _scale(mm(x_(eps_p, a, w), x_(eps, b, z)), C) + _scale(mm(x_(eps, a, z), x_(s_z2, b, z)), D)
    return lhs, rhs
