"""Exception types raised across the package."""


class DDInferError(Exception):
    """Base class for all package errors."""


class ValidationError(DDInferError, ValueError):
    """Input data violates a documented precondition."""


class OutOfRange(ValidationError):
    pass


class NotCompletelyPositive(ValidationError):
    pass


class OutOfDiamond(ValidationError):
    pass


class EmptyRow(ValidationError):
    pass


class OutsideStrip(ValidationError):
    pass


class UnboundedViolation(DDInferError):
    """The witness maximum diverges (point lies at or beyond the strip edge)."""


class MissingPair(ValidationError):
    pass


class NoFeasibleChannel(DDInferError):
    pass


class NotConvergedWarning(UserWarning):
    pass
