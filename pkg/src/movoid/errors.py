"""Exception hierarchy shared by every module."""


class MovoidError(Exception):
    """Base class for all package errors."""


class BadParameters(MovoidError, ValueError):
    pass


class NotPrime(BadParameters):
    pass


class BudgetExceeded(MovoidError):
    pass


class FieldMismatch(MovoidError, TypeError):
    pass


class DivisionByZero(MovoidError, ZeroDivisionError):
    pass


class LogOfZero(MovoidError, ValueError):
    pass


class NotADivisor(BadParameters):
    pass


class NonIntegralPeriod(MovoidError, ArithmeticError):
    pass


class FormCheckFailed(MovoidError):
    """Raised when a constructed form is not alternating or not
    non-degenerate. This indicates a bug, not bad input."""


class D0NotGreaterThanOne(BadParameters):
    pass


class BOutOfRange(BadParameters):
    pass


class NotSrg(BadParameters):
    pass


class CountMismatch(MovoidError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InternalInconsistency(MovoidError):
    pass
