"""Exception and warning types shared across the package."""


class HeunTermError(Exception):
    """Base class for all package errors."""


class DomainError(HeunTermError, ValueError):
    """An argument lies outside the domain of the operation."""


class PoleError(DomainError):
    """A lower hypergeometric parameter hits a nonpositive integer."""

    def __init__(self, message, parameter=None, index=None):
        super().__init__(message)
        self.parameter = parameter
        self.index = index


class ConvergenceError(HeunTermError, ArithmeticError):
    """A series did not meet its truncation tolerance within the term cap."""


class DegenerateRecurrenceError(DomainError):
    """Some R_n with 1 <= n <= N vanishes, so d_n cannot be solved for."""


class TerminationConditionError(DomainError):
    """The exponent parameter does not satisfy the termination condition."""


class VerificationError(HeunTermError):
    """An internal cross-check between two independent routes failed."""


class OutsideDiskWarning(UserWarning):
    """A p = q+1 series was summed at |omega z| >= 1."""


class DegreeDropWarning(UserWarning):
    """The continuant leading coefficient nearly cancelled."""


class RootAccuracyWarning(UserWarning):
    """A polished root still leaves a large polynomial residual."""
