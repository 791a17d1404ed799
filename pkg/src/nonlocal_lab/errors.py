"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the admissible parameter range."""


class PoleError(DomainError):
    """A special function was evaluated at (or too close to) a pole."""


class PoleEncountered(ArithmeticError):
    """A Fourier-table coefficient hit a Gamma pole.

    Signals that the transform of the offending term is not a plain
    homogeneous function (it picks up point-supported or logarithmic
    corrections the calculus does not model).
    """


class Unsupported(ArithmeticError):
    """The symbolic calculus would need a feature it deliberately lacks."""


class NotConverged(ArithmeticError):
    """A quadrature or extrapolation failed to reach its target accuracy."""
