"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`LanemdenError`, so callers (the CLI in particular) can separate
computational failures from programming errors.
"""


class LanemdenError(Exception):
    """Base class for all package errors."""


class UnsupportedDomain(LanemdenError, ValueError):
    pass


class InvalidResolution(LanemdenError, ValueError):
    pass


class SolverDiverged(LanemdenError, RuntimeError):
    """Iterative linear solver did not reach its tolerance."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ExponentOutOfRange(LanemdenError, ValueError):
    pass


class DimensionOutOfRange(LanemdenError, ValueError):
    pass


class InvalidRadius(LanemdenError, ValueError):
    pass


class QuadratureError(LanemdenError, RuntimeError):
    pass


class ZeroField(LanemdenError, ValueError):
    pass


class SubcriticalityViolated(LanemdenError, ValueError):
    pass


class SupercriticalPair(LanemdenError, ValueError):
    pass


class AlphaBetaProductOne(LanemdenError, ValueError):
    pass


class DomainMismatch(LanemdenError, ValueError):
    pass


class ArgumentOutOfRange(LanemdenError, ValueError):
    pass


class NoBracket(LanemdenError, RuntimeError):
    pass


class VolumeMismatch(LanemdenError, ValueError):
    pass


class ParseError(LanemdenError, ValueError):
    """Malformed JSON configuration; carries the 1-based line/column."""

    def __init__(self, message, line=0, column=0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ConfigInvalid(LanemdenError, ValueError):
    """A configuration value violates a precondition of its command."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
