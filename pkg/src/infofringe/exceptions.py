"""Exception types raised by infofringe."""


class InfoFringeError(ValueError):
    """Base class for all library errors."""


class DomainError(InfoFringeError):
    """An argument lies outside the domain of the operation."""


class InvalidStateError(InfoFringeError):
    """A mode state is not normalized."""


class BoundarySingularityError(DomainError):
    """The metric density was requested at f = 0 or f = 1, where it is 0/0."""


class NonIdentifiableError(InfoFringeError):
    """The data cannot determine the fringe wavenumber (e.g. a single x value)."""


class ParseError(InfoFringeError):
    """A CSV input could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
