"""Exception hierarchy shared across the workbench.

The server maps these onto HTTP statuses (400 / 404 / 409) and the CLI
maps them onto exit codes, so library code should raise the most
specific type that applies.
"""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base class for all domain errors raised by this package."""


class ContractViolation(WorkbenchError):
    """An argument or state precondition was violated (HTTP 400 / exit 1).

    ``field`` names the offending input when one can be singled out.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class UnknownResource(WorkbenchError):
    """A referenced id does not resolve (HTTP 404)."""


class StageRuleViolation(WorkbenchError):
    """A workflow stage gate blocked the operation (HTTP 409)."""


class PersistenceError(WorkbenchError):
    """A saved artifact could not be read back."""


class SchemaVersionMismatch(PersistenceError):
    """The file's schema_version is not one this build understands."""


class CorruptFile(PersistenceError):
    """The file is syntactically or structurally invalid.

    The message names the first invalid field encountered.
    """
