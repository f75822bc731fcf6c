"""Exception hierarchy shared by every listpac module."""


class ListPacError(Exception):
    """Base class for all errors raised by listpac."""


class ClassFormatError(ListPacError):
    """Malformed HCF or sample text."""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class DomainError(ListPacError):
    """An argument is outside the range an operation accepts."""


class BudgetExceededError(ListPacError):
    """A search or enumeration cap was exhausted."""


class RealizabilityError(ListPacError):
    """A sample is not consistent with the class (or with a list hypothesis)."""


class OrientationError(ListPacError):
    """A list orientation violates one of its invariants."""


class CompressionError(ListPacError):
    """A compression stage ran out of rounds without certifying a cover."""

    def __init__(self, message, best_miss_rate=None):
        self.best_miss_rate = best_miss_rate
        super().__init__(message)


class ConfigError(ListPacError):
    """The settings file is missing, unreadable or has bad values."""
