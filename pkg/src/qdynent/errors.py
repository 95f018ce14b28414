"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible or unsupported shapes."""


class DomainError(ValueError):
    """An input lies outside the domain of an operation (e.g. not unitary)."""


class ConstructionError(ValueError):
    """A measurement or state failed validation on construction."""


class SizeError(ValueError):
    """A requested computation exceeds a hard size guard."""


class NumericalError(ArithmeticError):
    """An iterative routine failed to converge.

    ``best`` carries the last iterate so callers can inspect or reuse it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
