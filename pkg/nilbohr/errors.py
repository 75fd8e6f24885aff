"""
Exception hierarchy. Missing witnesses and failed membership tests are
results, not errors; everything here signals unusable input.
"""


class NilBohrError(Exception):
    """Base class for all nilbohr errors."""


class DomainError(NilBohrError, ValueError):
    """A value lies outside the domain of an operation."""


class ParameterError(NilBohrError, ValueError):
    """Infeasible or out-of-bounds parameters."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

    def __str__(self):
        if self.field:
            return f"{self.field}: {self.args[0]}"
        return str(self.args[0])


class OutOfRangeError(NilBohrError, IndexError, ValueError):
    """An index reaches beyond a finite truncation."""


class IncompleteInputError(NilBohrError):
    """A required subset value is missing."""


class InconsistencyError(NilBohrError):
    """Data forces two different answers."""
