"""Exception hierarchy shared by all detectors."""


class DriftscanError(Exception):
    """Base class for all library errors."""


class ParseError(DriftscanError):
    """Malformed input data; carries the offending line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(DriftscanError):
    """Input violates a structural invariant (non-finite value, bad epoch...)."""


class ArgumentError(DriftscanError):
    """A precondition on an operation argument does not hold."""


class EvaluationError(DriftscanError):
    """A measure or test is undefined on the given inputs."""

    def __init__(self, message, measure=None):
        if measure is not None:
            message = f"{measure}: {message}"
        super().__init__(message)
        self.measure = measure


class StateError(DriftscanError):
    """An operation was called on an object in the wrong state."""
