"""Exception hierarchy shared by every module of the package."""
from __future__ import annotations


class PadicError(Exception):
    """Base class for all errors raised by this package."""


class InputError(PadicError, ValueError):
    """Rejected input: bad arguments, context mismatch, malformed files."""


class PadicDomainError(PadicError, ValueError):
    """A series was requested outside its certified convergence ball."""


class PremiseError(InputError):
    """The hypothesis of a verification suite does not hold for the input."""


class SingularMatrixError(PadicError, ArithmeticError):
    """Exact elimination met a singular matrix I - mu*A."""

    def __init__(self, mu, message: str | None = None):
        self.mu = mu
        super().__init__(message or f"I - mu*A is singular at mu = {mu}")


class PrecisionError(PadicError, ArithmeticError):
    """The requested certified exponent is beyond what the working precision allows.

    ``achievable`` is the best certified exponent that was actually obtained.
    """

    def __init__(self, message: str, achievable, requested=None, report=None):
        self.achievable = achievable
        self.requested = requested
        self.report = report
        super().__init__(message)


class EngineFault(PadicError, RuntimeError):
    """An identity that must hold exactly failed beyond its certificate.

    This signals an implementation bug, never a property of the input matrix.
    """
