"""The odd theta function of the elliptic curve C / (Z + tau Z).

``theta`` is normalized by ``theta'(0) = 1``.  It is computed from the
bilateral series

    vartheta(z) = sum_n exp(i pi tau (n+1/2)^2 + 2 pi i (n+1/2)(z+1/2))

which is odd, vanishes exactly on the lattice and obeys

    vartheta(z+1)   = -vartheta(z)
    vartheta(z+tau) = -exp(-i pi tau) exp(-2 pi i z) vartheta(z),

divided by its derivative at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import lgamma

import numpy as np

from .errors import ConfigurationError, PoleError
from .jets import HbarJet, PointGerm, series_div

POLE_GUARD = 1e-6
TERM_RTOL = 1e-18


def lattice_reduce(z: complex, tau: complex) -> complex:
    """Representative of ``z`` modulo Z + tau Z, closest to the origin."""
    z = complex(z)
    m = round(z.imag / tau.imag)
    z = z - m * tau
    z = z - round(z.real)
    best = z
    for a in (-1, 0, 1):
        for b in (-1, 0, 1):
            c = z - a - b * tau
            if abs(c) < abs(best):
                best = c
    return best


def lattice_distance(z: complex, tau: complex) -> float:
    return abs(lattice_reduce(z, tau))


@dataclass(frozen=True)
class ThetaEngine:
    """Evaluator for theta, its derivatives and its logarithmic derivative.

    Parameters
    ----------
    tau : complex
        Modular parameter, ``Im(tau) > 0``.
    term_cutoff : int
        Hard cap on the number of series terms on each side of the origin.
    max_derivative : int
        Largest derivative order :meth:`theta_germ` will produce.
    """

    tau: complex
    term_cutoff: int = 64
    max_derivative: int = 24
    nome: complex = field(init=False)
    norm_const: complex = field(init=False)

    def __post_init__(self):
        tau = complex(self.tau)
        if not tau.imag > 0:
            raise ConfigurationError(f"tau must lie in the upper half plane, got {tau}")
        if self.term_cutoff < 2:
            raise ConfigurationError("term_cutoff must be at least 2")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "nome", np.exp(1j * np.pi * tau))
        half = np.arange(-self.term_cutoff, self.term_cutoff) + 0.5
        terms = 2j * np.pi * half * np.exp(1j * np.pi * tau * half**2 + 1j * np.pi * half)
        object.__setattr__(self, "norm_const", 1.0 / terms.sum())

    def with_max_derivative(self, m: int) -> "ThetaEngine":
        if m <= self.max_derivative:
            return self
        return replace(self, max_derivative=m)

    # ---------------------------------------------------------------------
    def _exponents(self, z):
        half = np.arange(-self.term_cutoff, self.term_cutoff) + 0.5
        expo = 1j * np.pi * self.tau * half**2 + 2j * np.pi * half * (complex(z) + 0.5)
        return half, expo

    def _terms(self, z):
        half, expo = self._exponents(z)
        re = expo.real
        keep = re >= re.max() + np.log(TERM_RTOL)
        return half[keep], expo[keep]

    def theta_eval(self, z: complex) -> complex:
        """theta(z)."""
        _, expo = self._terms(z)
        return complex(np.exp(expo).sum() * self.norm_const)

    __call__ = theta_eval

    def theta_taylor(self, z: complex, m: int) -> np.ndarray:
        """Normalized Taylor coefficients ``theta^(k)(z) / k!`` for ``k <= m``."""
        if m > self.max_derivative:
            raise ConfigurationError(
                f"derivative order {m} exceeds the configured maximum {self.max_derivative}")
        half, expo = self._exponents(z)
        logw = np.log(2j * np.pi * half)
        out = np.empty(m + 1, dtype=complex)
        for k in range(m + 1):
            # term-wise derivative, computed in log space to avoid overflow
            e = expo + k * logw - lgamma(k + 1)
            keep = e.real >= e.real.max() + np.log(TERM_RTOL)
            out[k] = np.exp(e[keep]).sum()
        return out * self.norm_const

    def theta_germ(self, z: complex, m: int) -> PointGerm:
        """theta(z), theta'(z), ..., theta^(m)(z)."""
        return PointGerm.from_taylor(self.theta_taylor(z, m), complex(z))

    def theta_jet(self, z: complex, a: complex, order: int) -> HbarJet:
        """Jet of ``theta(z + a*hbar)``."""
        t = self.theta_taylor(z, order)
        return HbarJet(t * complex(a) ** np.arange(order + 1))

    # ---------------------------------------------------------------------
    def check_pole(self, z: complex, what: str = "point"):
        d = lattice_distance(z, self.tau)
        if d < POLE_GUARD:
            raise PoleError(f"{what} {complex(z)} lies within {d:.2e} of the lattice")

    def rho_taylor(self, z: complex, m: int) -> np.ndarray:
        """Normalized Taylor coefficients of ``rho = theta'/theta`` at ``z``."""
        self.check_pole(z)
        eng = self.with_max_derivative(m + 1)
        t = eng.theta_taylor(z, m + 1)
        dt = t[1:] * np.arange(1, m + 2)
        return series_div(dt, t[:m + 1])

    def rho_germ(self, z: complex, m: int) -> PointGerm:
        """rho(z), rho'(z), ..., rho^(m)(z) by quotient-rule recursion."""
        return PointGerm.from_taylor(self.rho_taylor(z, m), complex(z))

    def rho(self, z: complex) -> complex:
        return complex(self.rho_taylor(z, 0)[0])

    def rho_jet(self, z: complex, a: complex, order: int) -> HbarJet:
        """Jet of ``rho(z + a*hbar)``."""
        r = self.rho_taylor(z, order)
        return HbarJet(r * complex(a) ** np.arange(order + 1))

    def ratio_jet(self, num: complex, a: complex, den: complex, b: complex, order: int) -> HbarJet:
        """Jet of ``theta(num + a hbar) / theta(den + b hbar)``."""
        self.check_pole(den, "denominator")
        return self.theta_jet(num, a, order) / self.theta_jet(den, b, order)

    # independent cross-check ------------------------------------------------
    def theta_product(self, z: complex) -> complex:
        """theta(z) from the Jacobi triple product.

        Used only as an oracle: it shares no code with the series above.
        """
        q = self.nome
        n = np.arange(1, 200)
        q2n = q ** (2 * n)
        s = np.sin(np.pi * complex(z))
        num = np.prod((1 - q2n * np.exp(2j * np.pi * z)) * (1 - q2n * np.exp(-2j * np.pi * z)))
        den = np.prod((1 - q2n) ** 2)
        return complex(s / np.pi * num / den)
