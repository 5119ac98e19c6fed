"""Exception hierarchy shared by every module.

Each class carries the exit code the command-line front end reports for it.
"""


class SUnitError(Exception):
    exit_code = 1


class InvalidInputError(SUnitError, ValueError):
    """Malformed or out-of-range input (zero denominator, duplicate values, ...)."""

    exit_code = 2


class ResidueError(SUnitError, ValueError):
    """A requested length violates the congruence condition modulo m."""

    exit_code = 3


class ThresholdError(SUnitError, ValueError):
    """A requested length lies below what the constructions can reach."""

    exit_code = 4

    def __init__(self, message, minimum=None):
        super().__init__(message)
        self.minimum = minimum


class DelegatedCaseError(SUnitError, ValueError):
    """2 in S: that case is settled by older explicit constructions and is not rebuilt here."""

    exit_code = 5


class BudgetError(SUnitError, RuntimeError):
    """A search space or iteration count exceeds the configured budget."""

    exit_code = 6

    def __init__(self, message, size=None):
        super().__init__(message)
        self.size = size


class BoundTooSmallError(BudgetError):
    """No admissible witness exists inside the exponent box; a larger H may help."""
