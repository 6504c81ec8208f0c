"""Truncated function spaces O = C[[z]] and L_lambda, residue pairing, dual bases.

``O`` has the basis ``e^i = z^i / i!``.  For ``lambda`` off the lattice the
spanning family of ``L_lambda`` is ``(theta(lambda+z)/theta(z))^{(i)}``; for
``lambda = n + m tau`` it is ``rho^{(j)}(z) exp(-2 pi i m z)`` with
``rho = theta'/theta``.  :func:`dualize` turns the spanning family into the
exact residue-dual of ``(e^i)`` by Gram inversion.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import factorial

import numpy as np

from .errors import DomainError, DualizationError, PoleError, TruncationError
from .jets import series_div, series_mul
from .theta import POLE_GUARD, ThetaEngine, lattice_distance

DEFAULT_TRUNCATION = 40
DEFAULT_DEPTH = 64
MAX_CONDITION = 1e12


# ---------------------------------------------------------------------------
# Laurent series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentSeries:
    """Coefficients of ``z^low .. z^high``; exponents above ``high`` are unknown."""

    low: int
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex).reshape(-1))

    @property
    def high(self) -> int:
        return self.low + self.coeffs.size - 1

    @classmethod
    def monomial(cls, k: int, coeff: complex = 1.0, high: int | None = None):
        high = k if high is None else max(high, k)
        c = np.zeros(high - k + 1, dtype=complex)
        c[0] = coeff
        return cls(k, c)

    def coefficient(self, k: int) -> complex:
        if k > self.high:
            raise TruncationError(f"coefficient of z^{k} not retained (known up to z^{self.high})")
        if k < self.low:
            return 0j
        return complex(self.coeffs[k - self.low])

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        if not isinstance(other, LaurentSeries):
            return LaurentSeries(self.low, self.coeffs * other)
        low = self.low + other.low
        high = min(self.high + other.low, other.high + self.low)
        n = high - low + 1
        if n <= 0:
            raise TruncationError("product has no determined coefficients")
        c = np.convolve(self.coeffs, other.coeffs)[:n]
        return LaurentSeries(low, c)

    __rmul__ = __mul__

    def derivative(self, times: int = 1) -> "LaurentSeries":
        low, c = self.low, self.coeffs.copy()
        for _ in range(times):
            exps = np.arange(low, low + c.size)
            c = c * exps
            low -= 1
            # a constant term differentiates to zero; keep the slot so the range shifts uniformly
        return LaurentSeries(low, c)

    def residue(self) -> complex:
        return self.coefficient(-1)

    def __call__(self, z: complex) -> complex:
        """Partial sum of the retained terms at ``z``."""
        exps = np.arange(self.low, self.high + 1)
        return complex(np.sum(self.coeffs * complex(z) ** exps))


def residue_pairing(f: LaurentSeries, g: LaurentSeries) -> complex:
    """``res_0(f g dz)``; raises :class:`TruncationError` if undetermined."""
    low = f.low + g.low
    if -1 < low:
        return 0j
    return (f * g).coefficient(-1)


# ---------------------------------------------------------------------------
# basis functions
# ---------------------------------------------------------------------------

def _lattice_coords(lam: complex, tau: complex, tol: float = POLE_GUARD):
    """Integers ``(n, m)`` with ``lam = n + m tau`` if ``lam`` is on the lattice, else None."""
    m = round(lam.imag / tau.imag)
    n = round((lam - m * tau).real)
    if abs(lam - n - m * tau) < tol:
        return n, m
    return None


def _exp_taylor(c: complex, n: int) -> np.ndarray:
    return np.array([c**k / factorial(k) for k in range(n)], dtype=complex)


def generating_laurent(engine: ThetaEngine, lam: complex, depth: int) -> LaurentSeries:
    """Laurent expansion at 0 of the generator of the ``L_lam`` family.

    ``theta(lam+z)/theta(z)`` off the lattice, ``rho(z) exp(-2 pi i m z)`` on it.
    The series is retained from ``z^-1`` to ``z^(depth-2)``.
    """
    lam = complex(lam)
    eng = engine.with_max_derivative(depth + 1)
    t0 = eng.theta_taylor(0.0, depth)
    reduced = t0[1:depth + 1]  # theta(z)/z
    coords = _lattice_coords(lam, engine.tau)
    if coords is None:
        if lattice_distance(lam, engine.tau) < POLE_GUARD:
            raise PoleError(f"lambda={lam} within the pole guard of the lattice")
        num = eng.theta_taylor(lam, depth - 1)
        return LaurentSeries(-1, series_div(num, reduced[:depth]))
    _, m = coords
    # theta'(z) / (theta(z)/z) gives z*rho(z)
    dnum = t0[1:depth + 1] * np.arange(1, depth + 1)
    zrho = series_div(dnum, reduced)
    if m:
        zrho = series_mul(zrho, _exp_taylor(-2j * np.pi * m, depth))
    return LaurentSeries(-1, zrho)


def laurent_of_basis(family: str, index: int, depth: int = DEFAULT_DEPTH,
                     engine: ThetaEngine | None = None, lam: complex = 0j) -> LaurentSeries:
    """Laurent expansion at 0 of ``e^index`` (family ``"O"``) or the raw ``e_{index;lam}`` (``"L"``)."""
    if family == "O":
        c = np.zeros(depth, dtype=complex)
        c[0] = 1.0 / factorial(index)
        return LaurentSeries(index, c)
    if family != "L":
        raise ValueError(f"unknown family {family!r}")
    if engine is None:
        raise ValueError("the L family needs a ThetaEngine")
    coords = _lattice_coords(complex(lam), engine.tau)
    if coords is not None and coords[1]:
        # the derivative acts on rho only; the exponential factor is reattached afterwards
        d = generating_laurent(engine, 0j, depth + index).derivative(index)
        ex = LaurentSeries(0, _exp_taylor(-2j * np.pi * coords[1], d.coeffs.size))
        return d * ex
    return generating_laurent(engine, lam, depth + index).derivative(index)


# ---------------------------------------------------------------------------
# dual bases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DualBasisPair:
    """Truncated bases ``(e^i)`` of O and the dual ``(ẽ_{i;lam})`` of ``L_lam``.

    ``dual_coeffs[k, j]`` expresses ``ẽ_{j;lam} = sum_k dual_coeffs[k, j] e_{k;lam}``.
    """

    engine: ThetaEngine
    lam: complex
    N: int = DEFAULT_TRUNCATION
    depth: int = DEFAULT_DEPTH
    raw_L_basis: tuple = field(default=(), repr=False)
    gram: np.ndarray | None = field(default=None, repr=False)
    dual_coeffs: np.ndarray | None = field(default=None, repr=False)
    condition: float | None = None

    @classmethod
    def build(cls, engine: ThetaEngine, lam: complex, N: int = DEFAULT_TRUNCATION,
              depth: int = DEFAULT_DEPTH) -> "DualBasisPair":
        lam = complex(lam)
        depth = max(depth, N + 2)
        raw = tuple(laurent_of_basis("L", j, depth, engine, lam) for j in range(N))
        gram = np.empty((N, N), dtype=complex)
        for i in range(N):
            ei = laurent_of_basis("O", i, depth)
            for j in range(N):
                gram[i, j] = residue_pairing(ei, raw[j])
        return cls(engine, lam, N, depth, raw, gram)

    @property
    def on_lattice(self) -> bool:
        return _lattice_coords(self.lam, self.engine.tau) is not None

    @property
    def lattice_m(self) -> int:
        c = _lattice_coords(self.lam, self.engine.tau)
        return 0 if c is None else c[1]

    def pairing_matrix(self) -> np.ndarray:
        """``<e^i, ẽ_{j;lam}>`` (identity after dualization)."""
        return self.gram @ self.dual_coeffs

    # evaluation of basis functions away from 0 --------------------------------
    def raw_values(self, z: complex) -> np.ndarray:
        """``e_{k;lam}(z)`` for ``k < N`` from the Taylor expansion at ``z``."""
        z = complex(z)
        eng = self.engine.with_max_derivative(self.N + 2)
        if lattice_distance(z, eng.tau) < POLE_GUARD:
            raise PoleError(f"basis functions have a pole at z={z}")
        fact = np.array([float(factorial(k)) for k in range(self.N)])
        if self.on_lattice:
            r = eng.rho_taylor(z, self.N - 1)
            return r * fact * np.exp(-2j * np.pi * self.lattice_m * z)
        num = eng.theta_taylor(z + self.lam, self.N - 1)
        den = eng.theta_taylor(z, self.N - 1)
        return series_div(num, den) * fact

    def dual_values(self, z: complex) -> np.ndarray:
        """``ẽ_{j;lam}(z)`` for ``j < N``."""
        if self.dual_coeffs is None:
            raise DualizationError("pair has not been dualized")
        return self.raw_values(z) @ self.dual_coeffs


def dualize(pair: DualBasisPair) -> DualBasisPair:
    """Fill ``dual_coeffs`` with the inverse Gram matrix."""
    cond = float(np.linalg.cond(pair.gram))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        diag = np.abs(np.diag(pair.gram))
        raise DualizationError(
            f"gram matrix condition number {cond:.3e} exceeds {MAX_CONDITION:.0e}; "
            f"|diag| range [{diag.min():.3e}, {diag.max():.3e}], lambda={pair.lam}")
    inv = np.linalg.inv(pair.gram)
    return replace(pair, dual_coeffs=inv, condition=cond)


def build_dual_pair(engine: ThetaEngine, lam: complex, N: int = DEFAULT_TRUNCATION,
                    depth: int = DEFAULT_DEPTH) -> DualBasisPair:
    return dualize(DualBasisPair.build(engine, lam, N, depth))


# ---------------------------------------------------------------------------
# closed-form kernels and their truncated-sum oracles
# ---------------------------------------------------------------------------

def green_kernel(engine: ThetaEngine, lam: complex, z: complex, w: complex) -> complex:
    """``theta(z-w+lam) / (theta(z-w) theta(lam))``."""
    engine.check_pole(z - w, "z-w")
    engine.check_pole(lam, "lambda")
    return engine(z - w + lam) / (engine(z - w) * engine(lam))


def regularized_l0_kernel(engine: ThetaEngine, z: complex, w: complex, c0: complex = 0j) -> complex:
    """``rho(z-w) + c0``, the kernel reproduced by the dual bases of O and L_0."""
    return engine.rho(z - w) + c0


def kernel_sum_oracle(pair: DualBasisPair, z: complex, w: complex, N: int | None = None) -> complex:
    """Truncated sum ``sum_{i<N} e^i(w) ẽ_{i;lam}(z)`` (requires ``|w| < |z|``)."""
    N = pair.N if N is None else N
    if N > pair.N:
        raise ValueError(f"pair holds only {pair.N} dual functions")
    if N == 0:
        return 0j
    z, w = complex(z), complex(w)
    # the expansion in w converges up to the nearest pole w = z - gamma
    radius = lattice_distance(z, pair.engine.tau)
    if abs(w) >= radius:
        raise DomainError(f"kernel sum needs |w| < {radius:.3g}, got |w|={abs(w):.3g}")
    mono = np.array([w**i / factorial(i) for i in range(N)])
    terms = mono * pair.dual_values(z)[:N]
    if N >= 8:
        head = np.abs(terms[: N // 2]).max()
        tail = np.abs(terms[-2:]).max()
        if tail > head and tail > 1e-300:
            raise DomainError("partial sums are growing; point outside the convergence region")
    return complex(terms.sum())


def kernel_sum_reversed(pair: DualBasisPair, z: complex, w: complex, N: int | None = None) -> complex:
    """``sum_{i<N} ẽ_{i;lam}(w) e^i(z)`` (requires ``|z| < |w|``)."""
    N = pair.N if N is None else N
    z, w = complex(z), complex(w)
    if abs(z) >= abs(w):
        raise DomainError(f"reversed kernel sum needs |z| < |w|, got {abs(z):.3g} >= {abs(w):.3g}")
    mono = np.array([z**i / factorial(i) for i in range(N)])
    return complex(np.sum(mono * pair.dual_values(w)[:N]))


def measure_l0_constant(pair0: DualBasisPair, points) -> tuple[complex, float]:
    """Estimate ``c0`` with ``sum e^i(w) ẽ_{i;0}(z) = rho(z-w) + c0``.

    Returns the mean offset and the spread (max deviation from the mean),
    the latter measuring how well the z,w dependence matches ``rho(z-w)``.
    """
    offs = np.array([kernel_sum_oracle(pair0, z, w) - pair0.engine.rho(z - w) for z, w in points])
    c0 = complex(offs.mean())
    return c0, float(np.max(np.abs(offs - c0)))
