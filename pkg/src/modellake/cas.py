"""Content-addressed, immutable blob storage for physical artifacts.

On-disk contract (bit-exact):

    objects/<first 2 hex>/<next 2 hex>/<remaining 60 hex>            payload
    objects/<first 2 hex>/<next 2 hex>/<remaining 60 hex>.meta.json  sidecar

The sidecar carries ``{id, kind, size_bytes, stored_at}`` with ``stored_at``
in RFC 3339 UTC. Writes go to a temp file followed by an atomic rename, so a
crashed or concurrent writer never leaves a partially visible blob; a payload
without its sidecar is treated as invisible and repaired on the next put.
Every read re-hashes the payload, so single-byte tampering surfaces as a
corruption error instead of silently flowing downstream.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator

from .canonical import canonical_json_bytes, sha256_hex, utc_now
from .errors import ConflictError, CorruptBlobError, NotFoundError, StorageError

_DIGEST_RE = re.compile(r"^[0-9a-f]{64}$")
_META_SUFFIX = ".meta.json"


class ArtifactKind(str, Enum):
    DATASET = "dataset"
    MODEL = "model"
    CODE = "code"
    ENVIRONMENT = "environment"
    REPORT = "report"

    @classmethod
    def parse(cls, value: "ArtifactKind | str") -> "ArtifactKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            raise ValueError(f"unknown artifact kind: {value!r}") from None


@dataclass(frozen=True)
class BlobId:
    """sha256 content hash; rendered form is ``sha256:<64 lowercase hex>``."""

    algorithm: str
    digest: str

    def __str__(self) -> str:
        return f"{self.algorithm}:{self.digest}"

    @classmethod
    def parse(cls, value: "BlobId | str") -> "BlobId":
        if isinstance(value, cls):
            return value
        if not isinstance(value, str):
            raise ValueError(f"not a blob id: {value!r}")
        algorithm, _, digest = value.partition(":")
        if algorithm != "sha256" or not _DIGEST_RE.match(digest):
            raise ValueError(f"not a blob id: {value!r}")
        return cls(algorithm="sha256", digest=digest)

    @classmethod
    def for_payload(cls, payload: bytes) -> "BlobId":
        return cls(algorithm="sha256", digest=sha256_hex(payload))


@dataclass(frozen=True)
class BlobMeta:
    id: BlobId
    kind: ArtifactKind
    size_bytes: int
    stored_at: str

    def to_doc(self) -> dict:
        return {
            "id": str(self.id),
            "kind": self.kind.value,
            "size_bytes": self.size_bytes,
            "stored_at": self.stored_at,
        }


class CasStore:
    """Local filesystem CAS backend.

    The store is the only code that touches ``objects/``; everything above it
    deals in BlobIds. Remote backends would implement this same surface.
    """

    def __init__(self, root: "Path | str"):
        self.root = Path(root)

    def _paths(self, blob_id: BlobId) -> tuple[Path, Path]:
        d = blob_id.digest
        payload = self.root / d[:2] / d[2:4] / d[4:]
        return payload, payload.with_name(payload.name + _META_SUFFIX)

    def _write_atomic(self, target: Path, data: bytes) -> None:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp_name, target)
        except OSError as exc:
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
            raise StorageError(f"blob write failed: {exc}") from exc

    def put_blob(self, payload: bytes, kind: "ArtifactKind | str") -> BlobId:
        """Store ``payload``; idempotent, kind bound at first write."""
        kind = ArtifactKind.parse(kind)
        blob_id = BlobId.for_payload(payload)
        payload_path, meta_path = self._paths(blob_id)
        if meta_path.exists():
            existing = self.blob_meta(blob_id)
            if existing.kind is not kind:
                raise ConflictError(
                    f"blob {blob_id} already stored with kind "
                    f"{existing.kind.value!r}, not {kind.value!r}"
                )
            return blob_id
        if not payload_path.exists():
            self._write_atomic(payload_path, payload)
        # Sidecar written last: a payload without meta stays invisible.
        meta = BlobMeta(id=blob_id, kind=kind, size_bytes=len(payload), stored_at=utc_now())
        self._write_atomic(meta_path, canonical_json_bytes(meta.to_doc()))
        return blob_id

    def get_blob(self, blob_id: "BlobId | str") -> bytes:
        """Return the stored bytes, verifying the digest on every read."""
        try:
            blob_id = BlobId.parse(blob_id)
        except ValueError:
            raise NotFoundError(f"no such blob: {blob_id}") from None
        payload_path, meta_path = self._paths(blob_id)
        if not payload_path.exists() or not meta_path.exists():
            raise NotFoundError(f"no such blob: {blob_id}")
        try:
            payload = payload_path.read_bytes()
        except OSError as exc:
            raise StorageError(f"blob read failed: {exc}") from exc
        if sha256_hex(payload) != blob_id.digest:
            raise CorruptBlobError(blob_id)
        return payload

    def has_blob(self, blob_id: "BlobId | str") -> bool:
        try:
            blob_id = BlobId.parse(blob_id)
        except ValueError:
            return False
        payload_path, meta_path = self._paths(blob_id)
        return payload_path.exists() and meta_path.exists()

    def blob_meta(self, blob_id: "BlobId | str") -> BlobMeta:
        try:
            blob_id = BlobId.parse(blob_id)
        except ValueError:
            raise NotFoundError(f"no such blob: {blob_id}") from None
        _, meta_path = self._paths(blob_id)
        if not meta_path.exists():
            raise NotFoundError(f"no such blob: {blob_id}")
        try:
            doc = json.loads(meta_path.read_text("utf-8"))
        except (OSError, ValueError) as exc:
            raise StorageError(f"unreadable blob meta for {blob_id}: {exc}") from exc
        return BlobMeta(
            id=blob_id,
            kind=ArtifactKind.parse(doc["kind"]),
            size_bytes=int(doc["size_bytes"]),
            stored_at=str(doc["stored_at"]),
        )

    def blob_kind(self, blob_id: "BlobId | str") -> ArtifactKind | None:
        try:
            return self.blob_meta(blob_id).kind
        except NotFoundError:
            return None

    def iter_blobs(self) -> Iterator[BlobId]:
        if not self.root.exists():
            return
        for first in sorted(self.root.iterdir()):
            if not first.is_dir():
                continue
            for second in sorted(first.iterdir()):
                if not second.is_dir():
                    continue
                for entry in sorted(second.iterdir()):
                    name = entry.name
                    if name.endswith(_META_SUFFIX) or name.startswith(".tmp-"):
                        continue
                    digest = first.name + second.name + name
                    if _DIGEST_RE.match(digest):
                        yield BlobId(algorithm="sha256", digest=digest)

    def verify_store(self) -> list[BlobId]:
        """Re-hash every payload; return the ids that no longer match."""
        corrupt: list[BlobId] = []
        try:
            for blob_id in self.iter_blobs():
                payload_path, _ = self._paths(blob_id)
                if sha256_hex(payload_path.read_bytes()) != blob_id.digest:
                    corrupt.append(blob_id)
        except OSError as exc:
            raise StorageError(
                f"store scan aborted: {exc}", partial=corrupt, incomplete=True
            ) from exc
        return sorted(corrupt, key=str)
