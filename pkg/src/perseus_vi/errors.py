"""Exception hierarchy shared by every module of the package."""


class PerseusError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(PerseusError, ValueError):
    pass


class OrderUnavailable(PerseusError, ValueError):
    """Requested derivative order exceeds what the oracle provides."""


class NotInSet(PerseusError, ValueError):
    pass


class NoKnownSolution(PerseusError, ValueError):
    pass


class NoSaddleStructure(PerseusError, ValueError):
    pass


class EmptyCertificateSet(PerseusError, ValueError):
    pass


class EmptyTrace(PerseusError, ValueError):
    pass


class InvalidOpt(PerseusError, ValueError):
    pass


class InvalidSpec(PerseusError, ValueError):
    pass


class DegenerateStep(PerseusError):
    """Raised when ||x - v|| falls below r_min and lambda is undefined."""


class BudgetExhausted(PerseusError):
    """The inner solver produced no certified iterate within its budget."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class SubsolverFailure(PerseusError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class BruteForceMismatch(PerseusError):
    pass


class InsufficientPoints(PerseusError, ValueError):
    pass


class NonpositiveValue(PerseusError, ValueError):
    pass


class ConfigParseError(PerseusError, ValueError):
    pass


class UnknownProblem(PerseusError, KeyError):
    pass


class UnknownMethod(PerseusError, KeyError):
    pass
