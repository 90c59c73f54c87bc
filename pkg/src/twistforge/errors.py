"""Exception hierarchy shared by all twistforge modules."""


class TwistforgeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(TwistforgeError):
    """Malformed curve-spec file or polynomial text."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class BudgetExceededError(TwistforgeError):
    """A configured search/closure budget was exhausted."""


class StructureError(TwistforgeError):
    """Input data violates a structural precondition (bad group, bad field,
    embedding problem outside the solvable family, ...)."""


class VerificationError(TwistforgeError):
    """An internal consistency check that should hold for valid inputs failed."""
