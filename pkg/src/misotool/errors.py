"""Exception hierarchy shared by all misotool modules."""


class MisotoolError(Exception):
    """Base class for errors raised by misotool."""


class DomainError(MisotoolError, ValueError):
    """An argument lies outside the domain of the operation."""


class ExactPathError(DomainError):
    """The operation has no exact-rational implementation."""


class ParseError(MisotoolError, ValueError):
    """A matrix or vector document is malformed."""


class ClassificationError(MisotoolError):
    """The input operator is not an m-isometry (or fails a structural check
    every m-isometry passes)."""


class PreconditionError(MisotoolError):
    """A required hypothesis does not hold for the given data.

    ``quantity`` holds the name of the failing quantity and ``value`` its
    computed value.
    """

    def __init__(self, msg, quantity=None, value=None):
        super().__init__(msg)
        self.quantity = quantity
        self.value = value


class ConvergenceError(MisotoolError):
    """An iterative numerical method did not converge."""

