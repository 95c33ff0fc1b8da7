"""Exception hierarchy mapped to CLI exit codes.

ValidationError -> exit 1 (bad configuration or arguments)
DataError       -> exit 2 (malformed or degenerate input data)
NumericalError  -> exit 3 (failure during computation)

All inherit ValueError so library callers can catch broadly.
"""


class SurdensError(ValueError):
    """Base class for all errors raised by this package."""

    exit_code = 3


class ValidationError(SurdensError):
    """Invalid configuration, option, or parameter value."""

    exit_code = 1


class DataError(SurdensError):
    """Input data violates a format or shape contract."""

    exit_code = 2


class NumericalError(SurdensError):
    """Degenerate or failed numerical computation."""

    exit_code = 3
