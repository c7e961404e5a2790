"""Exception hierarchy shared by the library and the command-line front end.

Every class carries the process exit status the CLI uses when the error
escapes a command.
"""


class TomofreeError(Exception):
    exit_code = 1


class InvalidArgument(TomofreeError, ValueError):
    exit_code = 4


class DegenerateCalibration(InvalidArgument):
    """Raised when the HOM non-overlap fraction leaves no interfering pairs."""


class ParseError(TomofreeError, ValueError):
    exit_code = 3


class NotAState(TomofreeError, ValueError):
    """A matrix that should be a density matrix is not positive semidefinite."""

    exit_code = 5

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class InsufficientData(TomofreeError, ValueError):
    exit_code = 6


class OptimizerDiagnostic(TomofreeError, RuntimeError):
    """Raised when every restart of a numerical search failed to converge.

    ``best`` holds the best candidate found so callers can still inspect it.
    """

    exit_code = 7

    def __init__(self, message, best=None, best_value=None):
        super().__init__(message)
        self.best = best
        self.best_value = best_value
