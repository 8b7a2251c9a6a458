"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class ArchvalError(Exception):
    """Base class for library errors."""


class ParameterError(ArchvalError, ValueError):
    """A numeric parameter lies outside its valid domain."""


class CatalogError(ArchvalError, KeyError):
    """A name does not resolve to a catalog entry."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class ConfigError(ArchvalError, ValueError):
    """A configuration value or parameter path cannot be resolved."""


class ScenarioError(ArchvalError):
    """A scenario file failed to parse or validate.

    ``issues`` holds every problem found, not just the first one.
    """

    def __init__(self, message: str, issues: list[str] | None = None):
        self.issues = list(issues or [])
        if self.issues:
            message = message + "\n" + "\n".join(f"  - {i}" for i in self.issues)
        super().__init__(message)
