class DefrepError(Exception):
    """Base class for all library errors."""


class InvalidInput(DefrepError, ValueError):
    pass


class CapExceeded(DefrepError):
    pass


class NotAHomomorphism(InvalidInput):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConsistencyError(DefrepError):
    """An internal computation contradicted a proven statement."""

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


class HypothesisWarning(UserWarning):
    """A theorem's hypothesis fails; the corresponding check only reports."""
