"""Exception types shared across the package."""


class TeamrepError(Exception):
    """Base class for all errors raised by teamrep."""


class ParameterError(TeamrepError, ValueError):
    """An argument is outside its documented domain."""


class DataError(TeamrepError, ValueError):
    """Input data is malformed or inconsistent with the network."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConvergenceError(TeamrepError, ArithmeticError):
    """The walk series diverges or the fixed-point iteration stalls."""
