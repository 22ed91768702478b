"""Exception hierarchy shared by every veelab module."""
from __future__ import annotations


class VeeLabError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(VeeLabError, ValueError):
    pass


class ZeroVector(VeeLabError, ValueError):
    pass


class MixedScalarMode(VeeLabError, TypeError):
    pass


class IndexOutOfRange(VeeLabError, IndexError):
    pass


class SpanDeficient(VeeLabError, ValueError):
    pass


class NotEigenvector(VeeLabError, ValueError):
    pass


class SamplingExhausted(VeeLabError, RuntimeError):
    pass


class PoleHit(VeeLabError, ZeroDivisionError):
    pass


class SingularMetric(VeeLabError, ValueError):
    pass


class FactorizationFailure(VeeLabError, ArithmeticError):
    pass


class RankDeficient(VeeLabError, ValueError):
    """Raised when the pivot matrix of third derivatives has rank below N-1.

    The singular values are attached so callers can report them.
    """

    def __init__(self, message: str, singular_values=None, rank: int | None = None):
        super().__init__(message)
        self.singular_values = singular_values
        self.rank = rank


class ZeroH(VeeLabError, ZeroDivisionError):
    pass


class HVanishes(VeeLabError, ZeroDivisionError):
    pass


class BadCaseParameters(VeeLabError, ValueError):
    pass


class UnknownName(VeeLabError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class MissingParameter(VeeLabError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class BadParameter(VeeLabError, ValueError):
    pass


class IsotropicComplement(VeeLabError, ValueError):
    pass


class ConditionOneFails(VeeLabError, ValueError):
    pass


class NoRootInInterval(VeeLabError, ValueError):
    pass


class SingularJacobian(VeeLabError, ArithmeticError):
    pass


class Diverged(VeeLabError, ArithmeticError):
    pass


class ParseError(VeeLabError, ValueError):
    def __init__(self, message: str, location: str | None = None):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
