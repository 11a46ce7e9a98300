"""Exception types shared across the package."""


class RayleighSumsError(Exception):
    """Base class for all package errors."""


class DomainError(RayleighSumsError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class RangeError(RayleighSumsError, ValueError):
    """Argument outside the supported parameter range (e.g. degree cap)."""


class NumericalFailure(RayleighSumsError, ArithmeticError):
    """An iteration or series failed to converge within its budget."""


class PoleError(RayleighSumsError, ArithmeticError):
    """Evaluation requested too close to a pole of the target quantity."""


class DegenerateSpacingError(RayleighSumsError, ArithmeticError):
    """Two summands share (nearly) the same denominator, making a
    reciprocal-difference sum ill-defined."""


class OrderingError(RayleighSumsError, ArithmeticError):
    """Refined zeros collided or came out of order."""


class InvariantViolation(RayleighSumsError, AssertionError):
    """A structural invariant failed; indicates a bug, not bad input."""


class CacheError(RayleighSumsError):
    """Base class for zero-cache problems."""


class CacheParseError(CacheError):
    """Cache file is not valid JSON or misses required fields.

    Carries the byte offset of the first problem when known.
    """

    def __init__(self, message, path=None, offset=None):
        super().__init__(message)
        self.path = path
        self.offset = offset


class StaleCacheError(CacheError):
    """Cache file was written by an incompatible format version."""


class UsageError(RayleighSumsError, ValueError):
    """Invalid combination of user-facing options (CLI exit code 2)."""
