"""Canonical JSON encoding and content-derived record identity.

Canonical form, used both as the wire format and as the hashing preimage:

- UTF-8 JSON, ``ensure_ascii`` off, no insignificant whitespace,
- object keys sorted lexicographically by Unicode code point,
- integers in shortest decimal form, floats in shortest round-trip decimal
  form (``float.__repr__``), non-finite floats rejected,
- timestamps as RFC 3339 UTC with a trailing ``Z`` at seconds precision.

A record's identity is ``sha256:<hex>`` over its canonical bytes with any
``record_id`` key excluded, so identity is stable across processes and the
id itself never feeds back into the hash.
"""

from __future__ import annotations

import hashlib
import json
import math
from datetime import datetime, timezone
from typing import Any

from .errors import SerializationError

RECORD_ID_KEY = "record_id"
_TS_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


def _check_tree(value: Any, path: str) -> None:
    if value is None or isinstance(value, (bool, int, str)):
        return
    if isinstance(value, float):
        if not math.isfinite(value):
            raise SerializationError(f"non-finite float at {path}: {value!r}")
        return
    if isinstance(value, (list, tuple)):
        for i, item in enumerate(value):
            _check_tree(item, f"{path}[{i}]")
        return
    if isinstance(value, dict):
        for key, item in value.items():
            if not isinstance(key, str):
                raise SerializationError(f"non-string object key at {path}: {key!r}")
            _check_tree(item, f"{path}.{key}")
        return
    raise SerializationError(f"unserializable value at {path}: {type(value).__name__}")


def canonical_json_bytes(value: Any) -> bytes:
    """Encode ``value`` to canonical JSON bytes (deterministic, pure)."""
    _check_tree(value, "$")
    text = json.dumps(
        value,
        sort_keys=True,
        ensure_ascii=False,
        separators=(",", ":"),
        allow_nan=False,
    )
    return text.encode("utf-8")


def canonical_scalar(value: Any) -> str:
    """Render any canonical-serializable value as a comparison string."""
    return canonical_json_bytes(value).decode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def record_id_for(payload: dict) -> str:
    """Content id of a record payload, with any embedded record_id excluded."""
    if RECORD_ID_KEY in payload:
        payload = {k: v for k, v in payload.items() if k != RECORD_ID_KEY}
    return "sha256:" + sha256_hex(canonical_json_bytes(payload))


def normalize_timestamp(value: str) -> str | None:
    """Normalize an RFC 3339 timestamp to UTC seconds precision.

    Accepts an explicit offset or ``Z`` and optional fractional seconds
    (truncated). Returns None when the input is not a valid timestamp;
    callers decide whether that is a violation or just "absent".
    """
    if not isinstance(value, str) or not value:
        return None
    raw = value.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(raw)
    except ValueError:
        return None
    if parsed.tzinfo is None:
        return None
    return parsed.astimezone(timezone.utc).replace(microsecond=0).strftime(_TS_FORMAT)


def utc_now() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).strftime(_TS_FORMAT)
