"""Numerical verification engine for the elliptic dynamical quantum group of sl2.

Submodules
----------
jets        truncated hbar-series and shift-operator symbols
theta       the normalized odd theta function and its derivatives
spaces      dual bases of O and L_lambda, expansion kernels
rmatrix     dynamical R-matrices, gauge function, matrix identities
evaluation  images of currents and L-operators in evaluation representations
verify      check suites and the JSON report
cli         the ``eqg-verify`` entry point
"""

from importlib.metadata import PackageNotFoundError, version

from .jets import DiffOpSymbol, HbarJet, PointGerm
from .rmatrix import RFamily, solve_phi
from .theta import ThetaEngine
from .verify import CheckSpec, VerificationReport, run_suite

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0+unknown"

__all__ = ["DiffOpSymbol", "HbarJet", "PointGerm", "RFamily", "ThetaEngine", "CheckSpec",
           "VerificationReport", "run_suite", "solve_phi", "__version__"]
