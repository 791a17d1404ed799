"""Verification laboratory for an anisotropic fractional-Laplacian model.

Closed Gamma-function forms of the operator applied to homogeneous fields,
their coupling, the Fourier symbol calculus that rederives them, and
independent principal-value quadrature oracles that cross-validate every
formula at desk scale.
"""

from .errors import DomainError, NotConverged, PoleEncountered, PoleError, Unsupported
from .model import FracParams, SymMatrix

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "FracParams",
    "NotConverged",
    "PoleEncountered",
    "PoleError",
    "SymMatrix",
    "Unsupported",
    "__version__",
]
