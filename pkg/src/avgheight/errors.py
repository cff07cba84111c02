"""Exception hierarchy shared by every module.

The CLI maps each class to a distinct exit code, so library code raises the
most specific one it can.
"""


class AvgHeightError(Exception):
    """Base class for all package errors."""


class PreconditionError(AvgHeightError, ValueError):
    """An operation was called outside its documented domain."""


class SingularSpecialization(PreconditionError):
    """The discriminant vanishes at the requested parameter."""


class BudgetExceeded(AvgHeightError):
    """An enumeration or factorization exceeded its configured budget."""


class NVarsMismatch(AvgHeightError, ValueError):
    """Polynomials over different numbers of variables were combined."""
