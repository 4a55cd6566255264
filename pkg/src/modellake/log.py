"""Append-only record log, the lake's single source of truth.

One canonical-JSON envelope per line: ``{"record": {...}, "record_type": "..."}``.
Appends are flushed and fsynced before the caller acknowledges a write, so
any acknowledged record survives a hard kill. A torn trailing line (a crash
mid-append) is dropped and truncated away on the next open; it can only ever
belong to an unacknowledged write.

Graph and catalog state are derived: replaying the log in order rebuilds
them deterministically.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .canonical import canonical_json_bytes
from .errors import StorageError


class RecordLog:
    def __init__(self, path: "Path | str", *, fsync: bool = True):
        self.path = Path(path)
        self.fsync = fsync

    def replay(self) -> list[tuple[str, dict]]:
        """All committed (record_type, payload) envelopes, oldest first.

        Scans for a torn tail and truncates it so later appends start at a
        clean line boundary.
        """
        if not self.path.exists():
            return []
        try:
            raw = self.path.read_bytes()
        except OSError as exc:
            raise StorageError(f"record log unreadable: {exc}") from exc
        entries: list[tuple[str, dict]] = []
        good_end = 0
        offset = 0
        for line in raw.split(b"\n"):
            end = offset + len(line)
            terminated = end < len(raw)  # a "\n" followed this slice
            offset = end + 1
            if not line:
                if terminated:
                    good_end = offset
                continue
            try:
                doc = json.loads(line.decode("utf-8"))
                record_type = doc["record_type"]
                payload = doc["record"]
                if not isinstance(record_type, str) or not isinstance(payload, dict):
                    raise ValueError("bad envelope")
            except (ValueError, KeyError, UnicodeDecodeError):
                if terminated:
                    raise StorageError(
                        f"record log corrupt at byte {end - len(line)}: unparseable committed line"
                    ) from None
                break  # torn tail from a crash mid-append; drop it
            if not terminated:
                break  # complete-looking JSON but never terminated: not committed
            entries.append((record_type, payload))
            good_end = offset
        if good_end < len(raw):
            with open(self.path, "r+b") as handle:
                handle.truncate(good_end)
        return entries

    def append(self, record_type: str, payload: dict) -> None:
        """Durably append one envelope; returns only after fsync."""
        line = canonical_json_bytes({"record": payload, "record_type": record_type}) + b"\n"
        try:
            with open(self.path, "ab") as handle:
                handle.write(line)
                handle.flush()
                if self.fsync:
                    os.fsync(handle.fileno())
        except OSError as exc:
            raise StorageError(f"record log append failed: {exc}") from exc
