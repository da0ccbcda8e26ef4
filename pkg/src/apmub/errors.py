"""Exception hierarchy.

Every error raised by the package derives from :class:`ApmubError`.  The
three direct families below map onto the CLI exit codes: precondition
failures exit with 2, verification failures with 3 and unavailable
resources with 4.
"""

from __future__ import annotations

__all__ = [
    "ApmubError",
    "PreconditionError",
    "VerificationError",
    "Unavailable",
    "NotPrime",
    "DomainViolation",
    "FieldMismatch",
    "UnsupportedCharacteristic",
    "DivisionByZero",
    "NotLatin",
    "OrderMismatch",
    "EmptyInput",
    "OrderTooSmall",
    "SingleClass",
    "PreconditionViolated",
    "NonConstantBlockSize",
    "CongruenceViolation",
    "NoAdmissiblePlan",
    "NotBiangular",
    "InternalInvariantBroken",
]


class ApmubError(Exception):
    """Base class for all package errors."""


class PreconditionError(ApmubError):
    """An input violates a documented precondition."""


class VerificationError(ApmubError):
    """A computed object failed an exact audit."""


class Unavailable(ApmubError):
    """A requested resource (for example a real Hadamard matrix) cannot be built."""


class NotPrime(PreconditionError):
    pass


class DomainViolation(PreconditionError):
    pass


class FieldMismatch(PreconditionError):
    pass


class UnsupportedCharacteristic(PreconditionError):
    pass


class DivisionByZero(PreconditionError, ZeroDivisionError):
    pass


class NotLatin(PreconditionError):
    pass


class OrderMismatch(PreconditionError):
    pass


class EmptyInput(PreconditionError):
    pass


class OrderTooSmall(PreconditionError):
    pass


class SingleClass(PreconditionError):
    pass


class PreconditionViolated(PreconditionError):
    pass


class NonConstantBlockSize(PreconditionError):
    pass


class CongruenceViolation(PreconditionError):
    pass


class NoAdmissiblePlan(PreconditionError):
    pass


class NotBiangular(VerificationError):
    pass


class InternalInvariantBroken(VerificationError):
    """A proven invariant failed; carries a dump of the offending state."""

    def __init__(self, message: str, dump: object = None) -> None:
        super().__init__(message)
        self.dump = dump
