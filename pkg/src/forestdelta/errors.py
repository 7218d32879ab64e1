"""Exception hierarchy shared by all modules."""


class ForestDeltaError(Exception):
    """Base class for every error raised by this package."""


class TermSyntaxError(ForestDeltaError, ValueError):
    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}: {text!r}")


class UnknownLabel(ForestDeltaError, ValueError):
    pass


class HoleCountError(ForestDeltaError, ValueError):
    pass


class KindMismatch(ForestDeltaError, TypeError):
    pass


class AlphabetMismatch(ForestDeltaError, ValueError):
    pass


class SpecInvalid(ForestDeltaError, ValueError):
    pass


class SizeLimitExceeded(ForestDeltaError, RuntimeError):
    pass


class NotReachableRestricted(ForestDeltaError, ValueError):
    pass


class ElementUnrealized(ForestDeltaError, LookupError):
    pass


class UnboundVariable(ForestDeltaError, ValueError):
    pass


class ForeignNode(ForestDeltaError, ValueError):
    pass


class NotPrenex(ForestDeltaError, ValueError):
    pass


class NotDA(ForestDeltaError, ValueError):
    def __init__(self, witness, message=None):
        self.witness = witness
        super().__init__(message or f"monoid violates the DA identity at {witness}")


class NotStratified(ForestDeltaError, ValueError):
    pass


class UnknownLetter(ForestDeltaError, ValueError):
    pass


class IdentityFails(ForestDeltaError, ValueError):
    pass


class PipelineOrderWarning(UserWarning):
    """Raised as a warning when a decision runs on a non-syntactic algebra."""
