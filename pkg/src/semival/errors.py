"""Shared exception types.

The CLI maps these onto exit codes: parse problems exit 2, capability
problems exit 3, everything else that reaches the top level exits 1.
"""


class SemivalError(Exception):
    """Base class for all library errors."""


class DomainError(SemivalError):
    """Invalid domain, configuration or restriction argument."""


class MismatchError(SemivalError):
    """Operands belong to different catalogs, semirings or universes."""


class CapacityError(SemivalError):
    """A dense enumeration would exceed the configured size cap."""


class CapabilityError(SemivalError):
    """The requested operation is not available for this algebra."""


class MassError(SemivalError):
    """Invalid mass assignment (negative, zero total, bad bpa)."""


class TotalConflictError(MassError):
    """Combination left no non-contradictory mass to condition on."""


class ParseError(SemivalError):
    """Model file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
