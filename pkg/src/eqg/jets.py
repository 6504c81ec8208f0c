"""Truncated power series in the formal parameter hbar.

An :class:`HbarJet` of order ``M`` holds the coefficients ``c_0 .. c_M`` of
``sum_k c_k hbar**k``.  Arithmetic is closed at fixed order: anything beyond
``hbar**M`` is dropped.

Operators of the form ``g(hbar * d/dz)`` are carried by a
:class:`DiffOpSymbol` (Taylor coefficients of ``g`` at 0) and applied to a
:class:`PointGerm` (value and derivatives of a function at one point) with
:func:`diffop_apply`.

Matrices whose entries are jets are plain complex arrays with the jet index
as the trailing axis, shape ``(n, n, M + 1)``; see :func:`jet_matmul`.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from numbers import Number

import numpy as np

from .errors import ConfigurationError, SingularJetError

DEFAULT_ORDER = 4

# constant term below this is treated as zero by the inverse
_SINGULAR_TOL = 1e-300


# ---------------------------------------------------------------------------
# coefficient-level series kernels (shared by jets and symbols)
# ---------------------------------------------------------------------------

def series_mul(a, b):
    """Cauchy product of two coefficient vectors, truncated to ``len(a)``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    n = a.shape[-1]
    return np.convolve(a, b)[:n]


def series_inv(a):
    a = np.asarray(a, dtype=complex)
    if abs(a[0]) <= _SINGULAR_TOL:
        raise SingularJetError("constant term vanishes; series is not invertible")
    n = a.shape[-1]
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0 / a[0]
    for k in range(1, n):
        out[k] = -np.dot(a[1:k + 1], out[k - 1::-1][:k]) / a[0]
    return out


def series_div(a, b):
    """Quotient ``a / b`` by forward substitution (``b[0] != 0``)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if abs(b[0]) <= _SINGULAR_TOL:
        raise SingularJetError("divisor has vanishing constant term")
    n = a.shape[-1]
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        out[k] = (a[k] - np.dot(b[1:k + 1], out[k - 1::-1][:k])) / b[0]
    return out


def series_exp(a):
    """exp of a series via the recurrence ``k e_k = sum_j j a_j e_{k-j}``."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[-1]
    out = np.zeros(n, dtype=complex)
    out[0] = np.exp(a[0])
    j = np.arange(n)
    for k in range(1, n):
        out[k] = np.dot(j[1:k + 1] * a[1:k + 1], out[k - 1::-1][:k]) / k
    return out


# ---------------------------------------------------------------------------
# HbarJet
# ---------------------------------------------------------------------------

class HbarJet:
    """Element of C[[hbar]] truncated at ``hbar**order``."""

    __slots__ = ("coeffs",)
    __array_priority__ = 100  # keep numpy scalars from swallowing the jet

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex).reshape(-1)
        if c.size == 0:
            raise ConfigurationError("a jet needs at least the constant term")
        self.coeffs = c

    # constructors -----------------------------------------------------------
    @classmethod
    def constant(cls, value, order=DEFAULT_ORDER):
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(c)

    @classmethod
    def hbar(cls, order=DEFAULT_ORDER):
        c = np.zeros(order + 1, dtype=complex)
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def zero(cls, order=DEFAULT_ORDER):
        return cls(np.zeros(order + 1, dtype=complex))

    @property
    def order(self):
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, k):
        return self.coeffs[k]

    def __repr__(self):
        return f"HbarJet({np.array2string(self.coeffs, precision=6)})"

    # helpers ----------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, HbarJet):
            if other.order != self.order:
                raise ConfigurationError(
                    f"jet order mismatch: {self.order} vs {other.order}")
            return other.coeffs
        if isinstance(other, Number):
            c = np.zeros_like(self.coeffs)
            c[0] = other
            return c
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return HbarJet(self.coeffs + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return HbarJet(self.coeffs - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return HbarJet(o - self.coeffs)

    def __neg__(self):
        return HbarJet(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Number):
            return HbarJet(self.coeffs * other)
        if isinstance(other, HbarJet):
            return jet_multiply(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            return HbarJet(self.coeffs / other)
        if isinstance(other, HbarJet):
            self._coerce(other)
            return HbarJet(series_div(self.coeffs, other.coeffs))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Number):
            return jet_invert(self) * other
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            return NotImplemented
        if n < 0:
            return jet_invert(self) ** (-n)
        out = HbarJet.constant(1.0, self.order)
        for _ in range(n):
            out = out * self
        return out

    def exp(self):
        return jet_exponential(self)

    def inverse(self):
        return jet_invert(self)

    def times_hbar(self):
        """Multiply by hbar (top coefficient falls off)."""
        c = np.zeros_like(self.coeffs)
        c[1:] = self.coeffs[:-1]
        return HbarJet(c)

    def div_hbar(self, atol=1e-12):
        """Divide by hbar; the result has order one less.

        The constant term must vanish (to ``atol`` relative to the jet size).
        """
        scale = max(1.0, float(np.max(np.abs(self.coeffs))))
        if abs(self.coeffs[0]) > atol * scale:
            raise SingularJetError("division by hbar of a jet with nonzero constant term")
        if self.order == 0:
            raise ConfigurationError("cannot divide an order-0 jet by hbar")
        return HbarJet(self.coeffs[1:])

    def truncate(self, order):
        if order > self.order:
            raise ConfigurationError("truncate cannot raise the order")
        return HbarJet(self.coeffs[:order + 1])

    def evaluate(self, hbar):
        """Polynomial value at a numeric hbar (for sanity checks only)."""
        return np.polyval(self.coeffs[::-1], hbar)

    def allclose(self, other, atol=1e-12):
        return float(np.max(np.abs(self.coeffs - self._coerce(other)))) <= atol


def _check_pair(a, b):
    if a.order != b.order:
        raise ConfigurationError(f"jet order mismatch: {a.order} vs {b.order}")


def jet_multiply(a: HbarJet, b: HbarJet) -> HbarJet:
    """Truncated Cauchy product."""
    _check_pair(a, b)
    return HbarJet(series_mul(a.coeffs, b.coeffs))


def jet_exponential(a: HbarJet) -> HbarJet:
    return HbarJet(series_exp(a.coeffs))


def jet_invert(a: HbarJet) -> HbarJet:
    """Multiplicative inverse; raises :class:`SingularJetError` if ``a_0 == 0``."""
    if a.coeffs[0] == 0:
        raise SingularJetError("jet with zero constant term has no inverse")
    return HbarJet(series_inv(a.coeffs))


# ---------------------------------------------------------------------------
# germs and operator symbols
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointGerm:
    """Value and first ``m`` derivatives ``d_0 .. d_m`` of a function at a point."""

    values: np.ndarray
    base_point: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex).reshape(-1))

    @classmethod
    def from_taylor(cls, taylor, base_point=0j):
        """Build from normalized Taylor coefficients ``f^(k)/k!``."""
        t = np.asarray(taylor, dtype=complex)
        fact = np.array([float(factorial(k)) for k in range(t.size)])
        return cls(t * fact, base_point)

    @property
    def order(self):
        return self.values.size - 1

    @property
    def taylor(self):
        fact = np.array([float(factorial(k)) for k in range(self.values.size)])
        return self.values / fact

    def shifted_jet(self, a, order):
        """Jet of ``f(base_point + a*hbar)`` (needs ``order`` derivatives)."""
        if self.order < order:
            raise ConfigurationError(
                f"germ carries {self.order} derivatives, {order} required")
        return HbarJet(self.taylor[:order + 1] * complex(a) ** np.arange(order + 1))

    def __add__(self, other):
        n = min(self.values.size, other.values.size)
        return PointGerm(self.values[:n] + other.values[:n], self.base_point)

    def __mul__(self, c):
        return PointGerm(self.values * c, self.base_point)

    __rmul__ = __mul__


class DiffOpSymbol:
    """Constant-coefficient operator ``g(hbar d)`` stored by Taylor coefficients of ``g``.

    Composition of operators is multiplication of symbols (series
    convolution); closed forms are never evaluated.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = np.array(coeffs, dtype=complex).reshape(-1)

    @classmethod
    def constant(cls, value, order=DEFAULT_ORDER):
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(c)

    @classmethod
    def exp_shift(cls, a, order=DEFAULT_ORDER):
        """Symbol ``exp(a u)``: the translation ``f(z) -> f(z + a hbar)``."""
        k = np.arange(order + 1)
        return cls(np.array([complex(a) ** j / factorial(j) for j in k]))

    @classmethod
    def identity_u(cls, order=DEFAULT_ORDER):
        """Symbol ``u`` itself."""
        c = np.zeros(order + 1, dtype=complex)
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @property
    def order(self):
        return self.coeffs.size - 1

    def __repr__(self):
        return f"DiffOpSymbol({np.array2string(self.coeffs, precision=6)})"

    def _other(self, other):
        if isinstance(other, DiffOpSymbol):
            n = min(self.order, other.order)
            return self.coeffs[:n + 1], other.coeffs[:n + 1]
        if isinstance(other, Number):
            c = np.zeros_like(self.coeffs)
            c[0] = other
            return self.coeffs, c
        return None

    def __add__(self, other):
        p = self._other(other)
        if p is None:
            return NotImplemented
        return DiffOpSymbol(p[0] + p[1])

    __radd__ = __add__

    def __sub__(self, other):
        p = self._other(other)
        if p is None:
            return NotImplemented
        return DiffOpSymbol(p[0] - p[1])

    def __rsub__(self, other):
        p = self._other(other)
        if p is None:
            return NotImplemented
        return DiffOpSymbol(p[1] - p[0])

    def __neg__(self):
        return DiffOpSymbol(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Number):
            return DiffOpSymbol(self.coeffs * other)
        p = self._other(other)
        if p is None:
            return NotImplemented
        return DiffOpSymbol(series_mul(*p))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            return DiffOpSymbol(self.coeffs / other)
        p = self._other(other)
        if p is None:
            return NotImplemented
        return DiffOpSymbol(series_div(*p))

    def __rtruediv__(self, other):
        p = self._other(other)
        if p is None:
            return NotImplemented
        return DiffOpSymbol(series_div(p[1], p[0]))

    def div_u(self, atol=1e-14):
        """Divide the symbol by ``u``; consumes one order."""
        if abs(self.coeffs[0]) > atol:
            raise ConfigurationError("symbol has a nonzero constant term; not divisible by u")
        return DiffOpSymbol(self.coeffs[1:])

    def truncate(self, order):
        return DiffOpSymbol(self.coeffs[:order + 1])

    def reciprocal(self):
        return DiffOpSymbol(series_inv(self.coeffs))

    def exp(self):
        return DiffOpSymbol(series_exp(self.coeffs))


def symbol_exp_u(order):
    """Coefficients of ``e^u`` as a symbol (shorthand)."""
    return DiffOpSymbol.exp_shift(1.0, order)


def diffop_apply(op: DiffOpSymbol, germ: PointGerm) -> HbarJet:
    """Evaluate ``(g(hbar d) f)(base_point)`` as a jet of order ``op.order``.

    The coefficient of ``hbar**k`` is ``g_k * f^(k)``.
    """
    M = op.order
    if germ.order < M:
        raise ConfigurationError(
            f"operator of order {M} needs {M} derivatives, germ has {germ.order}")
    return HbarJet(op.coeffs * germ.values[:M + 1])


# ---------------------------------------------------------------------------
# jet-valued matrices
# ---------------------------------------------------------------------------

def is_jet_array(a):
    return np.ndim(a) == 3


def jet_matmul(a, b):
    """Matrix product for numeric (2-d) or jet (3-d, trailing order axis) arrays."""
    if not is_jet_array(a) and not is_jet_array(b):
        return np.asarray(a) @ np.asarray(b)
    if not is_jet_array(a) or not is_jet_array(b):
        raise ConfigurationError("cannot multiply a numeric matrix by a jet matrix")
    if a.shape[-1] != b.shape[-1]:
        raise ConfigurationError("jet-matrix order mismatch")
    K = a.shape[-1]
    out = np.zeros((a.shape[0], b.shape[1], K), dtype=complex)
    for k in range(K):
        for j in range(k + 1):
            out[..., k] += a[..., j] @ b[..., k - j]
    return out


def jet_identity(n, order=None):
    if order is None:
        return np.eye(n, dtype=complex)
    out = np.zeros((n, n, order + 1), dtype=complex)
    out[np.arange(n), np.arange(n), 0] = 1.0
    return out


def scalar_entry(x, order=None):
    """Coefficient vector (jet mode) or complex value (numeric mode) of a scalar."""
    if isinstance(x, HbarJet):
        if order is not None and x.order != order:
            raise ConfigurationError("jet order mismatch while assembling a matrix")
        return x.coeffs
    if order is None:
        return complex(x)
    c = np.zeros(order + 1, dtype=complex)
    c[0] = x
    return c


def jet_coefficient(a, k):
    """Order-``k`` coefficient matrix of a jet matrix."""
    return a[..., k]


def max_coefficient_residual(a, b):
    """Per-order maximal entry difference; a single-element list in numeric mode."""
    d = np.abs(np.asarray(a) - np.asarray(b))
    if is_jet_array(d):
        return [float(d[..., k].max()) for k in range(d.shape[-1])]
    return [float(d.max())]
