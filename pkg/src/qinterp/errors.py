"""Exception hierarchy; the CLI maps these onto its exit-code contract."""


class QInterpError(Exception):
    """Base class for library errors."""


class ValidationError(QInterpError, ValueError):
    """Bad parameters or malformed input (CLI exit 2)."""


class NotPrimeError(ValidationError):
    """Field characteristic must be prime."""


class FieldMismatchError(ValidationError):
    """Operands belong to different fields."""


class BudgetExceededError(QInterpError):
    """Requested enumeration or statevector exceeds configured caps (CLI exit 3)."""


class NotInGoodRangeError(QInterpError):
    """A power-sum vector has no preimage with distinct x and nonzero y (CLI exit 4)."""


class SingularHankelError(NotInGoodRangeError):
    """The Hankel system built from the power sums is singular."""


class WrongRootCountError(NotInGoodRangeError):
    """The characteristic polynomial does not split into distinct roots."""


class ZeroWeightError(NotInGoodRangeError):
    """Recovered weights contain a zero entry."""


class AttemptsExhaustedError(QInterpError):
    """Random extension search gave up (CLI exit 5)."""


class InsufficientSamplesError(ValidationError):
    """Too few samples requested for a meaningful estimate."""
