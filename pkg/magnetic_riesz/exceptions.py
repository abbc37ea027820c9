"""Exception hierarchy for the magnetic Bochner-Riesz toolkit."""


class RieszError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(RieszError, ValueError):
    """An argument is outside the accepted set (empty samples, bad radius, unknown name)."""


class GridMismatchError(InvalidInputError):
    """Two grid functions (or a function and its grid) do not share a grid."""


class DomainError(RieszError, ValueError):
    """A mathematical function was evaluated outside of its domain."""


class PreconditionError(RieszError):
    """An operation was called outside the regime it supports."""


class SingularInputError(RieszError, ValueError):
    """The kernel is singular at the requested point (x == y)."""


class UnsupportedRegimeError(RieszError):
    """The requested order is outside the regime an oracle is valid for."""


class GammaPoleError(DomainError):
    """Gamma was evaluated at (or numerically on) a nonpositive integer."""

    def __init__(self, value: float, nearest_integer: int):
        self.value = value
        self.nearest_integer = nearest_integer
        super().__init__(f"Gamma function pole at {value!r} (nearest integer {nearest_integer})")
