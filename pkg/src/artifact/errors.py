"""Exception hierarchy shared by every module."""

from __future__ import annotations


class ArtifactError(Exception):
    """Base class for all errors raised by the package."""


class InvalidArgument(ArtifactError, ValueError):
    """An argument is outside its documented domain."""


class Unsupported(ArtifactError):
    """The request is well formed but beyond a documented capacity."""


class OptimizerAbort(ArtifactError, RuntimeError):
    """The derivative-free search met a non-finite objective value."""


class ValidationError(ArtifactError, ValueError):
    """A measurement document or record failed validation."""

    def __init__(self, message: str, path: str = "$") -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


class MonogamyViolation(ArtifactError, AssertionError):
    """A monogamy theorem failed on a simulated state (an implementation bug)."""
