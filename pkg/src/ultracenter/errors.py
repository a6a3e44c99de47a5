"""
Exception hierarchy for ultracenter.

Every error carries the process exit code the CLI maps it to.
"""
from typing import Any, Optional


class UltracenterError(Exception):
    """Base class for all ultracenter errors."""

    exit_code = 1

    def __init__(self, message: str, report: Optional[Any] = None):
        """Initialize the error with a message and an optional validation report."""
        super().__init__(message)
        self.report = report


class StructuralError(UltracenterError, ValueError):
    """Malformed input: bad matrix shape, unparsable distance, not a tree."""

    exit_code = 2


class DomainError(UltracenterError, ValueError):
    """A mathematical precondition of an operation does not hold."""

    exit_code = 1


class ResourceError(DomainError):
    """A configured size cap would be exceeded."""


class InvariantBreach(UltracenterError, AssertionError):
    """An internal invariant failed. This is a bug, never bad input."""

    exit_code = 3


class ConfigError(UltracenterError):
    """Configuration file could not be loaded or is invalid."""

    exit_code = 2
