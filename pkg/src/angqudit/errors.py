"""Exception hierarchy shared by every module.

Each class carries the CLI exit code it maps to.
"""


class AngQuditError(Exception):
    exit_code = 1


class InvalidParameterError(AngQuditError, ValueError):
    exit_code = 2


class InvalidStateError(InvalidParameterError):
    """A parameter set produced a matrix that is not a valid density matrix."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class TruncationError(InvalidParameterError):
    """The OAM truncation discards too much of the state."""

    def __init__(self, message, captured=None):
        super().__init__(message)
        self.captured = captured


class NumericalInconsistencyError(AngQuditError, ArithmeticError):
    exit_code = 3


class VerificationError(AngQuditError):
    exit_code = 4
