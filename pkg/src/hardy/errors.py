"""Exception types shared across the package."""


class HardyError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(HardyError, ValueError):
    """Invalid input: malformed pieces, bad exponents, schema violations."""


class InconsistencyError(HardyError, RuntimeError):
    """Internal cross-check failed, e.g. certified intervals do not intersect."""


class NotRepresentableError(HardyError, ValueError):
    """A requested object cannot be expressed in the piecewise power family."""
