"""Dynamical R-matrices on (C^2)^{⊗n} with weight-graded lambda shifts.

Basis conventions: slot vectors ``v_1, v_{-1}`` are indices 0 and 1, ``E_{ij}``
maps ``v_j`` to ``v_i`` and ``hbar_bar = E_11 - E_{-1,-1}`` has weights
``+1, -1``.  A 4x4 operator on slots (a, b) uses the row index ``2*a + b``.

The formal parameter hbar is either a complex number (:class:`NumericHbar`)
or a truncated series (:class:`JetHbar`); the same formulas produce complex
matrices or jet matrices of shape ``(4, 4, M + 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import solve_triangular

from .errors import ConfigurationError, DynamicalPoleError, PathError
from .jets import (DiffOpSymbol, HbarJet, diffop_apply, is_jet_array, jet_identity, jet_matmul,
                   scalar_entry, series_exp)
from .theta import POLE_GUARD, ThetaEngine, lattice_distance

WEIGHTS = (1, -1)
VARIANTS = ("plus", "minus", "bar")

# Shift sign under which each variant satisfies the three-slot Yang-Baxter
# identity written with R^{(12)}(lambda) on the left.  R^- uses +hbar*h; R^+
# and its gauge transform need -hbar*h (their +hbar*h form is the ordering
# used by the fundamental RLL relation).
DYBE_SHIFT_SIGN = {"plus": -1, "minus": 1, "bar": -1}


# ---------------------------------------------------------------------------
# the formal parameter
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NumericHbar:
    value: complex

    order = None

    def theta(self, engine: ThetaEngine, center: complex, c: float = 0):
        return engine(center + c * self.value)

    def constant(self, x):
        return complex(x)

    def shifted(self, lam, c):
        return lam + c * self.value


@dataclass(frozen=True)
class JetHbar:
    order: int = 3

    def theta(self, engine: ThetaEngine, center: complex, c: float = 0):
        return engine.theta_jet(center, c, self.order)

    def constant(self, x):
        return HbarJet.constant(x, self.order)

    def shifted(self, lam, c):
        return lam  # jets are centred at lam; the shift lives in the jet argument


def make_hbar(hbar):
    """``complex`` -> numeric mode, ``int`` -> jet mode of that order."""
    if isinstance(hbar, (NumericHbar, JetHbar)):
        return hbar
    if isinstance(hbar, (int, np.integer)) and not isinstance(hbar, bool):
        return JetHbar(int(hbar))
    return NumericHbar(complex(hbar))


def assemble(entries: dict, n: int, hb) -> np.ndarray:
    """Matrix from ``{(row, col): scalar}``; zero elsewhere."""
    order = hb.order
    shape = (n, n) if order is None else (n, n, order + 1)
    out = np.zeros(shape, dtype=complex)
    for (r, c), v in entries.items():
        out[r, c] = scalar_entry(v, order)
    return out


# ---------------------------------------------------------------------------
# weighted operators
# ---------------------------------------------------------------------------

def basis_weights(n: int) -> np.ndarray:
    """``(2**n, n)`` array of slot weights for each computational basis vector."""
    return np.array([[WEIGHTS[b] for b in bits] for bits in product((0, 1), repeat=n)])


@dataclass
class WeightedOperator:
    """Operator on (C^2)^{⊗n}; ``entries`` is complex ``(2^n, 2^n)`` or a jet matrix."""

    n: int
    entries: np.ndarray
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        dim = 2 ** self.n
        if self.entries.shape[:2] != (dim, dim):
            raise ConfigurationError(f"expected {dim}x{dim} entries, got {self.entries.shape}")
        if self.weights is None:
            self.weights = basis_weights(self.n)

    @property
    def jet_order(self):
        return self.entries.shape[-1] - 1 if is_jet_array(self.entries) else None

    def __matmul__(self, other: "WeightedOperator") -> "WeightedOperator":
        return WeightedOperator(self.n, jet_matmul(self.entries, other.entries), self.weights)

    def coefficient(self, k: int) -> np.ndarray:
        if self.jet_order is None:
            if k:
                raise ConfigurationError("numeric operators have no higher coefficients")
            return self.entries
        return self.entries[..., k]

    def total_weight_commutator(self) -> float:
        """max |[sum_k h^(k), A]|; zero for weight-preserving operators."""
        tot = self.weights.sum(axis=1)
        diff = tot[:, None] - tot[None, :]
        e = self.entries if self.jet_order is None else np.moveaxis(self.entries, -1, 0)
        return float(np.max(np.abs(e * diff)))


def dynamical_apply(builder, n: int, slots: tuple, shift_slots=(), sign: int = 1,
                    order=None) -> WeightedOperator:
    """Embed a two-slot operator with a weight-dependent dynamical shift.

    ``builder(mu)`` returns the 4x4 matrix for ``lambda + hbar*mu``; on every
    basis vector the shift ``mu`` is ``sign`` times the total weight of
    ``shift_slots``.  Those slots are untouched by the operator, so input and
    output weights coincide.
    """
    i, j = slots
    if set(shift_slots) & {i, j}:
        raise ConfigurationError("shift slots must be disjoint from the operator slots")
    wts = basis_weights(n)
    dim = 2 ** n
    cache = {}
    out = None
    for a in range(dim):
        bits = [(a >> (n - 1 - s)) & 1 for s in range(n)]
        mu = sign * int(sum(wts[a, s] for s in shift_slots))
        if mu not in cache:
            cache[mu] = np.asarray(builder(mu))
        op = cache[mu]
        if out is None:
            out = np.zeros((dim, dim) + op.shape[2:], dtype=complex)
        col = 2 * bits[i] + bits[j]
        for ci in (0, 1):
            for cj in (0, 1):
                b = list(bits)
                b[i], b[j] = ci, cj
                row = sum(bit << (n - 1 - s) for s, bit in enumerate(b))
                out[row, a] += op[2 * ci + cj, col]
    return WeightedOperator(n, out, wts)


def embed_constant(op: np.ndarray, n: int, slots: tuple) -> WeightedOperator:
    return dynamical_apply(lambda mu: op, n, slots)


# ---------------------------------------------------------------------------
# R-matrices
# ---------------------------------------------------------------------------

def _guard_lambda(engine, hb, lam, c):
    if hb.order is None:
        pt = lam + c * hb.value
        if lattice_distance(pt, engine.tau) < POLE_GUARD:
            raise DynamicalPoleError(f"shifted lambda {pt} is on the lattice")
    elif lattice_distance(lam, engine.tau) < POLE_GUARD:
        raise DynamicalPoleError(f"lambda {lam} is on the lattice")


def r_entries(variant: str, engine: ThetaEngine, hb, z: complex, lam: complex, c: float = 0):
    """The six non-zero entries of ``R^±(z, lam + c*hbar)`` keyed by (row, col)."""
    hb = make_hbar(hb)
    _guard_lambda(engine, hb, lam, c)
    engine.check_pole(z, "spectral parameter")
    th = lambda x, a=0: hb.theta(engine, x, a)  # noqa: E731
    tl = th(lam, c)
    dyn = th(lam, c + 1) * th(lam, c - 1) / (tl * tl)
    if variant in ("plus", "bar"):
        den = th(z, 1)
        if hb.order is None:
            engine.check_pole(z + hb.value, "z + hbar")
        rz = th(z) / den
        e = {(0, 0): hb.constant(1), (3, 3): hb.constant(1),
             (1, 1): rz * dyn, (2, 2): rz,
             (1, 2): th(z + lam, c) * th(0, 1) / (den * tl),
             (2, 1): -th(z - lam, -c) * th(0, 1) / (den * tl)}
    elif variant == "minus":
        den = th(z, -1)
        if hb.order is None:
            engine.check_pole(z - hb.value, "z - hbar")
        rz = th(z) / den
        e = {(0, 0): hb.constant(1), (3, 3): hb.constant(1),
             (1, 1): rz, (2, 2): rz * dyn,
             (1, 2): -th(z + lam, c) * th(0, 1) / (den * tl),
             (2, 1): th(z - lam, -c) * th(0, 1) / (den * tl)}
    else:
        raise ValueError(f"unknown R variant {variant!r}")
    return e


@dataclass(frozen=True)
class RFamily:
    """``R^+``, ``R^-`` or the gauge transform ``R̄`` of ``R^+``.

    ``hbar`` is a complex value (numeric mode) or an integer jet order.
    """

    variant: str
    engine: ThetaEngine
    hbar: object = 3
    phi_basepoint: complex | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        object.__setattr__(self, "hbar", make_hbar(self.hbar))

    @property
    def order(self):
        return self.hbar.order

    def matrix(self, z: complex, lam: complex, c: float = 0) -> np.ndarray:
        """4x4 matrix at ``lambda + c*hbar``."""
        if self.variant == "bar":
            return gauge_transform(self, z, lam, c)
        return assemble(r_entries(self.variant, self.engine, self.hbar, z, lam, c), 4, self.hbar)

    def __call__(self, z, lam, c=0):
        return self.matrix(z, lam, c)

    def build(self, z, lam) -> WeightedOperator:
        return WeightedOperator(2, self.matrix(z, lam))

    def embedded(self, z, lam, n, slots, shift_slots=(), sign=1) -> WeightedOperator:
        return dynamical_apply(lambda mu: self.matrix(z, lam, mu), n, slots, shift_slots, sign)


def build_R(variant: str, z: complex, lam: complex, engine: ThetaEngine, hbar=3) -> WeightedOperator:
    return RFamily(variant, engine, hbar).build(z, lam)


def classical_r_image(engine: ThetaEngine, z: complex, w: complex, lam: complex) -> np.ndarray:
    """Image of the classical r-matrix in the evaluation representations at z and w.

    The ``D ⊗ K`` term vanishes because K acts by zero.
    """
    engine.check_pole(z - w, "z-w")
    engine.check_pole(lam, "lambda")
    x = z - w
    r = 0.5 * engine.rho(x)
    om_p = engine(x + lam) / (engine(x) * engine(lam))
    om_m = engine(x - lam) / (engine(x) * engine(-lam))
    out = np.diag([r, -r, -r, r]).astype(complex)
    out[1, 2] = om_p   # e ⊗ f = E_{1,-1} ⊗ E_{-1,1}
    out[2, 1] = om_m   # f ⊗ e
    return out


# ---------------------------------------------------------------------------
# gauge function phi
# ---------------------------------------------------------------------------

def _toeplitz_lower(c, n):
    t = np.zeros((n, n), dtype=complex)
    for i in range(n):
        t[i, :i + 1] = c[i::-1][: i + 1]
    return t


@dataclass(frozen=True)
class PhiSolution:
    """Formal solution of ``phi(lam-hbar)/phi(lam+hbar) = theta(lam)/theta(lam+hbar)``.

    ``log phi = P(hbar d) log theta`` with the symbol ``P`` fixed order by order
    from the expanded functional equation.  The hbar^0 part of ``log phi`` is
    ``P_0 * int_{basepoint}^{lam} rho``; its additive constant is zero at the
    basepoint.
    """

    engine: ThetaEngine
    lam: complex
    order: int
    symbol: DiffOpSymbol
    basepoint: complex
    log_theta_integral: complex

    def log_phi_jet(self, c: float = 0) -> HbarJet:
        """Jet of ``log phi(lam + c*hbar)``."""
        M = self.order
        shift = DiffOpSymbol.exp_shift(c, M + 1)
        p0 = self.symbol.coeffs[0]
        s = (shift * self.symbol - p0).div_u()          # order M
        rho = self.engine.rho_germ(self.lam, M)
        j = diffop_apply(s, rho).times_hbar()
        return j + p0 * self.log_theta_integral

    def phi_jet(self, c: float = 0) -> HbarJet:
        return self.log_phi_jet(c).exp()

    def log_phi_derivative_jet(self) -> HbarJet:
        """Jet of ``(log phi)'(lam)``; its hbar^0 coefficient is ``rho(lam)/2``."""
        rho = self.engine.rho_germ(self.lam, self.order)
        return diffop_apply(self.symbol.truncate(self.order), rho)

    def ratio_jet(self, a: float, b: float) -> HbarJet:
        """``phi(lam + a hbar) / phi(lam + b hbar)``; the quadrature constant cancels."""
        return (self.log_phi_jet(a) - self.log_phi_jet(b)).exp()

    def functional_residual(self) -> np.ndarray:
        """Per-coefficient ``phi(lam-hbar)/phi(lam+hbar) - theta(lam)/theta(lam+hbar)``."""
        lhs = self.ratio_jet(-1, 1)
        rhs = self.engine.ratio_jet(self.lam, 0, self.lam, 1, self.order)
        return np.abs((lhs - rhs).coeffs)


def phi_symbol(order: int) -> DiffOpSymbol:
    """Solve ``(2 sinh u / u) P(u) = (e^u - 1)/u`` as a lower-triangular system."""
    n = order + 2
    eu = series_exp(np.r_[0.0, 1.0, np.zeros(n)])          # e^u to order n+1
    emu = series_exp(np.r_[0.0, -1.0, np.zeros(n)])
    sinh_u = (eu - emu)[1:n + 1]                           # (e^u - e^-u)/u
    rhs = eu[1:n + 1]                                      # (e^u - 1)/u
    p = solve_triangular(_toeplitz_lower(sinh_u, n), rhs, lower=True)
    return DiffOpSymbol(p)


def integrate_rho(engine: ThetaEngine, a: complex, b: complex, nodes: int = 48) -> complex:
    """Gauss-Legendre integral of rho along the segment [a, b]."""
    x, w = leggauss(nodes)
    pts = a + (b - a) * (x + 1) / 2
    probe = a + (b - a) * np.linspace(0, 1, 4 * nodes + 1)
    if min(lattice_distance(p, engine.tau) for p in probe) < 0.05:
        raise PathError(f"integration path [{a}, {b}] passes near the lattice")
    vals = np.array([engine.rho(p) for p in pts])
    return complex(np.sum(w * vals) * (b - a) / 2)


def _integrate_rho_detour(engine: ThetaEngine, a: complex, b: complex) -> complex:
    """Straight path if possible, else the first clear two-segment path.

    The path only picks the branch of the hbar^0 part of log phi; ratios of
    phi are independent of it.
    """
    try:
        return integrate_rho(engine, a, b)
    except PathError:
        pass
    mid = (a + b) / 2
    for r in (0.3, 0.5, 0.8):
        for k in range(8):
            w = mid + r * np.exp(2j * np.pi * k / 8)
            try:
                return integrate_rho(engine, a, w) + integrate_rho(engine, w, b)
            except PathError:
                continue
    raise PathError(f"no lattice-free path from {a} to {b}")


def solve_phi(engine: ThetaEngine, lam: complex, order: int = 3,
              basepoint: complex | None = None) -> PhiSolution:
    lam = complex(lam)
    engine.check_pole(lam, "lambda")
    if basepoint is None:
        basepoint = 0.5 + 0.5 * engine.tau
    q = _integrate_rho_detour(engine, complex(basepoint), lam)
    return PhiSolution(engine, lam, order, phi_symbol(order), complex(basepoint), q)


def gauge_transform(family: RFamily, z: complex, lam: complex, c: float = 0,
                    phi: PhiSolution | None = None) -> np.ndarray:
    """``phi(lam + hbar h^(2)) R(z, lam) phi(lam + hbar h^(1))^{-1}`` at ``lam + c hbar``.

    In numeric mode the only ratios that occur, ``phi(mu±hbar)/phi(mu∓hbar)``,
    are taken from the functional equation itself.
    """
    hb = family.hbar
    base = RFamily("plus", family.engine, hb)
    R = base.matrix(z, lam, c)
    eng = family.engine
    if hb.order is not None and phi is None:
        phi = solve_phi(eng, lam, hb.order, family.phi_basepoint)
    out = R.copy()
    for row in range(4):
        for col in range(4):
            b_out = WEIGHTS[row & 1]          # slot-2 weight of the output
            c_in = WEIGHTS[(col >> 1) & 1]    # slot-1 weight of the input
            if b_out == c_in:
                continue
            if hb.order is None:
                mu = lam + c * hb.value
                f = eng(mu + hb.value) / eng(mu)              # phi(mu+hbar)/phi(mu-hbar)
                ratio = f if b_out > c_in else 1 / f
                out[row, col] = R[row, col] * ratio
            else:
                ratio = phi.ratio_jet(c + b_out, c + c_in)
                out[row, col] = (HbarJet(R[row, col]) * ratio).coeffs
    return out


def gauge_L(L: np.ndarray, lam: complex, engine: ThetaEngine, hb, c_aux_in=None,
            phi: PhiSolution | None = None, c: float = 0) -> np.ndarray:
    """``phi(lam + hbar h) L phi(lam + hbar h^(1))^{-1}`` for L on aux ⊗ quantum.

    ``h`` is the quantum weight of the output, ``h^(1)`` the auxiliary weight
    of the input.
    """
    hb = make_hbar(hb)
    out = np.array(L, dtype=complex, copy=True)
    if hb.order is not None and phi is None:
        phi = solve_phi(engine, lam, hb.order)
    for row in range(4):
        for col in range(4):
            q_out = WEIGHTS[row & 1]
            a_in = WEIGHTS[(col >> 1) & 1]
            if q_out == a_in:
                continue
            if hb.order is None:
                mu = lam + c * hb.value
                f = engine(mu + hb.value) / engine(mu)
                out[row, col] = L[row, col] * (f if q_out > a_in else 1 / f)
            else:
                out[row, col] = (HbarJet(L[row, col]) * phi.ratio_jet(c + q_out, c + a_in)).coeffs
    return out


# ---------------------------------------------------------------------------
# matrix identities
# ---------------------------------------------------------------------------

def dybe_sides(family: RFamily, z1, z2, z3, lam, sign: int = 1):
    """Both sides of the three-slot dynamical Yang-Baxter equation

    R12(z12, l) R13(z13, l + s hbar h2) R23(z23, l)
        = R23(z23, l + s hbar h1) R13(z13, l) R12(z12, l + s hbar h3)
    """
    z12, z13, z23 = z1 - z2, z1 - z3, z2 - z3
    R = family.embedded
    lhs = R(z12, lam, 3, (0, 1)) @ R(z13, lam, 3, (0, 2), (1,), sign) @ R(z23, lam, 3, (1, 2))
    rhs = R(z23, lam, 3, (1, 2), (0,), sign) @ R(z13, lam, 3, (0, 2)) @ R(z12, lam, 3, (0, 1), (2,), sign)
    return lhs, rhs


def reversed_dybe_sides(family: RFamily, z1, z2, z3, lam, sign: int = 1):
    """The reversed ordering used by the RLL relation:

    R12(z12, l + s hbar h3) R13(z13, l) R23(z23, l + s hbar h1)
        = R23(z23, l) R13(z13, l + s hbar h2) R12(z12, l)
    """
    z12, z13, z23 = z1 - z2, z1 - z3, z2 - z3
    R = family.embedded
    lhs = R(z12, lam, 3, (0, 1), (2,), sign) @ R(z13, lam, 3, (0, 2)) @ R(z23, lam, 3, (1, 2), (0,), sign)
    rhs = R(z23, lam, 3, (1, 2)) @ R(z13, lam, 3, (0, 2), (1,), sign) @ R(z12, lam, 3, (0, 1))
    return lhs, rhs


def rll_sides(R_family: RFamily, L_builder, z1, z2, lam):
    """RLL relation with auxiliary slots 0, 1 and quantum slot 2:

    R12(z1-z2, l + hbar h) L1(z1, l) L2(z2, l + hbar h1)
        = L2(z2, l) L1(z1, l + hbar h2) R12(z1-z2, l)

    ``L_builder(z, lam, c)`` returns the 4x4 (aux ⊗ quantum) matrix at
    ``lam + c*hbar``.  The second argument of R is read as (z, lambda).
    """
    z12 = z1 - z2
    R = lambda shift: dynamical_apply(lambda mu: R_family(z12, lam, mu), 3, (0, 1), shift)  # noqa: E731
    L1 = lambda shift: dynamical_apply(lambda mu: L_builder(z1, lam, mu), 3, (0, 2), shift)  # noqa: E731
    L2 = lambda shift: dynamical_apply(lambda mu: L_builder(z2, lam, mu), 3, (1, 2), shift)  # noqa: E731
    lhs = R((2,)) @ L1(()) @ L2((0,))
    rhs = L2(()) @ L1((1,)) @ R(())
    return lhs, rhs


def fundamental_L(engine: ThetaEngine, hbar, u: complex, variant: str = "plus"):
    """``L(z, lam) = R(z - u, lam)`` on auxiliary ⊗ quantum."""
    fam = RFamily(variant, engine, hbar)
    return lambda z, lam, c=0: fam(z - u, lam, c)


def quantum_determinant(L_builder, engine: ThetaEngine, hbar, z: complex, lam: complex) -> np.ndarray:
    """``d(z-hbar, l) a(z, l-hbar) - b(z-hbar, l) c(z, l-hbar) theta(l+hbar h+hbar)/theta(l+hbar h)``.

    Numeric hbar only.  ``h`` is the quantum weight of the input vector.
    """
    hb = make_hbar(hbar)
    if hb.order is not None:
        raise ConfigurationError("quantum_determinant is evaluated with a numeric hbar")
    h = hb.value

    def block(Lm, ar, ac):  # quantum operator in auxiliary entry (ar, ac)
        return Lm.reshape(2, 2, 2, 2)[ar, :, ac, :]

    La = L_builder(z, lam - h)
    Ld = L_builder(z - h, lam)
    a, c_ = block(La, 0, 0), block(La, 1, 0)
    d, b = block(Ld, 1, 1), block(Ld, 0, 1)
    ratio = np.diag([engine(lam + h * w + h) / engine(lam + h * w) for w in WEIGHTS])
    return d @ a - b @ c_ @ ratio


def off_scalar_residual(m: np.ndarray) -> tuple[float, complex]:
    """Distance of ``m`` from the nearest multiple of the identity, and that multiple."""
    s = np.trace(m) / m.shape[0]
    return float(np.max(np.abs(m - s * np.eye(m.shape[0])))), complex(s)
