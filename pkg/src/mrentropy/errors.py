"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 for parse/validation problems, 3 for infeasible moments, 4 for numerical
non-convergence and 5 for I/O failures.
"""


class MreError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1

    @property
    def code(self):
        return type(self).__name__

    def to_dict(self):
        return {"type": self.code, "exit_code": self.exit_code, "message": str(self)}


class ValidationError(MreError, ValueError):
    """An input violates a documented invariant."""

    exit_code = 2

    def __init__(self, message, invariant=None):
        super().__init__(message)
        self.invariant = invariant

    def to_dict(self):
        d = super().to_dict()
        if self.invariant is not None:
            d["invariant"] = self.invariant
        return d


class DimensionError(ValidationError):
    """Vector lengths disagree with the outcome model."""


class EmptySampleError(ValidationError):
    """A statistic needs at least one observation."""


class SupportError(ValidationError):
    """``q`` vanishes where ``p`` has mass."""


class UseMonteCarloError(ValidationError):
    """Deterministic simplex quadrature was requested for too many types."""


class ParseError(MreError, ValueError):
    """Malformed input document."""

    exit_code = 2

    def __init__(self, message, location=None):
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location

    def to_dict(self):
        d = super().to_dict()
        d["location"] = self.location
        return d


class InfeasibleMomentError(MreError, ValueError):
    """The target expected value cannot be attained."""

    exit_code = 3


class ConvergenceError(MreError, ArithmeticError):
    exit_code = 4


class DivergenceError(ConvergenceError):
    """The multiplier bracket grew past its limit."""


class SeriesDivergenceError(ConvergenceError):
    """A nested series did not settle within its term budget."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})

    def to_dict(self):
        d = super().to_dict()
        d["diagnostics"] = self.diagnostics
        return d


class IoError(MreError, OSError):
    exit_code = 5
