"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class PoleError(ZeroDivisionError):
    """A rational function was evaluated at a zero of its denominator."""


class NonConvergenceError(ArithmeticError):
    """A truncated infinite sum could not be certified to the requested tolerance."""


class VerificationError(AssertionError):
    """An identity check failed."""
