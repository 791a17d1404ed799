"""Geometric objects of the model: solution fields, coefficient matrices, kernel.

The solution family is the homogeneous field |x|^p * x1/|x| (p = 1 - delta for
the difference model, p = s - delta for the Riesz model).  Coefficient fields
come in two parametric families, both rank-one perturbations of the identity
along the radial direction:

    classical   : (1 - eps) I + eps xhat (x) xhat
    fractional  : (1 - (1+2s)/2 eps) I + (d+2s)/2 eps xhat (x) xhat

and the jump kernel weights |x-y|^(-d-2s) by the averaged quadratic form of
the fractional field at the endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "FracParams",
    "SymMatrix",
    "homogeneous_field",
    "coeff_matrix",
    "coeff_eigen",
    "kernel_eval",
    "log_coeff_norm",
]

# |x| below this is treated as the singular point rather than normalized.
_ORIGIN_GUARD = 1e-300


@dataclass(frozen=True)
class FracParams:
    """Parameter tuple (d, s, delta, epsilon), validated per model flavor.

    model="meyers": delta, epsilon in [0, 1/2] (difference-quotient model).
    model="riesz":  delta in (0, d/2), epsilon in (0, 1) (fractional-gradient
    model; delta = 0 is a genuine pole of its constants).

    extended=True lifts the upper epsilon bound of the meyers flavor.  The
    coupling b(delta) exceeds 1/2 for small s, and the solution identity
    extends to any epsilon >= 0 because the kernel is affine in epsilon; the
    comparability constants and positive-definiteness guarantees then no
    longer apply and are not asserted.
    """

    d: int
    s: float
    delta: float = 0.0
    epsilon: float = 0.0
    model: str = "meyers"
    extended: bool = False

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.d!r}")
        if not 0.0 < self.s < 1.0:
            raise DomainError(f"order s must lie in (0, 1), got {self.s!r}")
        if self.model == "meyers":
            if not 0.0 <= self.delta <= 0.5:
                raise DomainError(f"delta must lie in [0, 1/2], got {self.delta!r}")
            eps_hi = math.inf if self.extended else 0.5
            if not 0.0 <= self.epsilon <= eps_hi:
                raise DomainError(f"epsilon must lie in [0, 1/2], got {self.epsilon!r}")
        elif self.model == "riesz":
            if not 0.0 < self.delta < 0.5 * self.d:
                raise DomainError(f"delta must lie in (0, d/2), got {self.delta!r}")
            if not 0.0 < self.epsilon < 1.0:
                raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        else:
            raise DomainError(f"unknown model flavor {self.model!r}")


@dataclass(frozen=True)
class SymMatrix:
    """Dense d x d symmetric matrix value of a coefficient field."""

    d: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.shape != (self.d, self.d):
            raise DomainError(f"expected shape {(self.d, self.d)}, got {a.shape}")
        if not np.array_equal(a, a.T):
            raise DomainError("matrix entries are not exactly symmetric")
        object.__setattr__(self, "entries", a)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


def _unit(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    r = math.sqrt(float(np.dot(x, x)))
    if r < _ORIGIN_GUARD:
        raise DomainError("evaluation at the singular point x = 0")
    return x / r


def homogeneous_field(p: float, x) -> float:
    """|x|^(p-1) * x1, i.e. |x|^p * xhat_1; odd and p-homogeneous."""
    x = np.asarray(x, dtype=float)
    r = math.sqrt(float(np.dot(x, x)))
    if r < _ORIGIN_GUARD:
        if p < 1.0:
            raise DomainError("field is singular (or has no value) at x = 0")
        return 0.0
    return r ** (p - 1.0) * float(x[0])


def _coeffs(flavor: str, params: FracParams) -> tuple[float, float]:
    """(isotropic, radial-rank-one) weights of the selected family."""
    eps = params.epsilon
    if flavor == "classical":
        return 1.0 - eps, eps
    if flavor == "fractional":
        return 1.0 - 0.5 * (1.0 + 2.0 * params.s) * eps, 0.5 * (params.d + 2.0 * params.s) * eps
    raise DomainError(f"unknown coefficient flavor {flavor!r}")


def coeff_matrix(flavor: str, params: FracParams, x) -> SymMatrix:
    """Coefficient matrix a I + b xhat (x) xhat at x != 0."""
    a, b = _coeffs(flavor, params)
    xh = _unit(x)
    m = a * np.eye(params.d) + b * np.outer(xh, xh)
    return SymMatrix(params.d, m)


def coeff_eigen(flavor: str, params: FracParams, x=None) -> tuple[float, float]:
    """(radial, tangential) eigenvalues; x-independent, x accepted for symmetry."""
    a, b = _coeffs(flavor, params)
    return a + b, a


def _quadratic_form(flavor: str, params: FracParams, x: np.ndarray, w: np.ndarray) -> float:
    """< A(x) w, w > for a unit vector w, without building the matrix."""
    a, b = _coeffs(flavor, params)
    xh = _unit(x)
    proj = float(np.dot(xh, w))
    return a * float(np.dot(w, w)) + b * proj * proj


def kernel_eval(params: FracParams, x, y) -> float:
    """Jump kernel |x-y|^(-d-2s) <(A(x)+A(y))/2 zhat, zhat>, z = x - y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = x - y
    r = math.sqrt(float(np.dot(z, z)))
    if r < _ORIGIN_GUARD:
        raise DomainError("kernel is singular on the diagonal x = y")
    zh = z / r
    q = 0.5 * (
        _quadratic_form("fractional", params, x, zh)
        + _quadratic_form("fractional", params, y, zh)
    )
    return r ** (-params.d - 2.0 * params.s) * q


def log_coeff_norm(params: FracParams) -> float:
    """Spectral norm of log A_(s,eps); x-independent.

    The matrix logarithm splits along the radial/tangential eigenspaces, so
    the norm is the larger of |log lambda| over the two analytic eigenvalues.
    """
    if not 0.0 <= params.epsilon <= 0.5:
        raise DomainError(f"epsilon must lie in [0, 1/2], got {params.epsilon!r}")
    lam_rad, lam_tan = coeff_eigen("fractional", params)
    return max(abs(math.log(lam_rad)), abs(math.log(lam_tan)))
