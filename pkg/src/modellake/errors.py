"""Exception hierarchy and the validation violation record.

Every failure surfaced by the lake maps to one of these classes; the HTTP
layer and the CLI translate them to status codes / exit codes by class, so
new call sites should raise the most specific one that applies.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Violation:
    """One broken rule: which field, which rule, and how to fix it."""

    field: str
    rule: str
    message: str

    def to_doc(self) -> dict:
        return {"field": self.field, "rule": self.rule, "message": self.message}


class ModelLakeError(Exception):
    """Base class for every error raised by this package."""

    code = "internal"


class StorageError(ModelLakeError):
    """Filesystem-level failure (short write, unreadable object, bad data dir)."""

    code = "storage"

    def __init__(self, message: str, *, partial=None, incomplete: bool = False):
        super().__init__(message)
        # Partial scan results, only meaningful for verify-style operations.
        self.partial = list(partial or [])
        self.incomplete = incomplete


class CorruptBlobError(StorageError):
    """A stored payload no longer matches its content hash."""

    code = "corrupt"

    def __init__(self, blob_id):
        super().__init__(f"stored payload does not match its digest: {blob_id}")
        self.blob_id = blob_id


class NotFoundError(ModelLakeError):
    code = "not_found"


class ConflictError(ModelLakeError):
    code = "conflict"


class QueryError(ModelLakeError):
    code = "query"


class SerializationError(ModelLakeError):
    code = "serialization"


class ConfigError(ModelLakeError):
    code = "config"


class ValidationFailed(ModelLakeError):
    """A record broke one or more invariants; carries the full report."""

    code = "validation_failed"

    def __init__(self, violations):
        self.violations: list[Violation] = list(violations)
        head = "; ".join(f"{v.field}: {v.message}" for v in self.violations[:3])
        more = len(self.violations) - 3
        if more > 0:
            head += f" (+{more} more)"
        super().__init__(head or "validation failed")
