"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class NumericsError(ArithmeticError):
    """A numerical procedure failed to converge to the requested accuracy.

    Carries an optional ``residual`` estimate of the achieved accuracy.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
