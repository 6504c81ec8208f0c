"""Exception types raised by the library.

Every numerical guard raises one of these instead of returning inf/nan.
"""


class EQGError(Exception):
    """Base class for all library errors."""


class ConfigurationError(EQGError, ValueError):
    """Inconsistent orders, insufficient germ depth, bad parameters."""


class SingularJetError(EQGError, ZeroDivisionError):
    """Inversion of a jet whose constant term vanishes."""


class PoleError(EQGError, ValueError):
    """Evaluation point within the guard distance of a pole locus."""


class DynamicalPoleError(PoleError):
    """Dynamical parameter (possibly shifted) on the lattice."""


class TruncationError(EQGError, ValueError):
    """A requested Laurent coefficient is not determined by the retained terms."""


class DualizationError(EQGError, ValueError):
    """Gram matrix too ill-conditioned to invert."""


class DomainError(EQGError, ValueError):
    """Point outside the convergence region of an expansion."""


class PathError(EQGError, ValueError):
    """Integration path passes too close to the lattice."""
