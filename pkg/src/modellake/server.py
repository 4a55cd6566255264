"""HTTP front door over one lake: registration, search, lineage, audits.

Single-process service on the stdlib ThreadingHTTPServer. Every response
body is canonical JSON produced by the same serializer the embedded CLI
uses, so the two modes are byte-identical by construction. Writes are
durable (log fsync) before the status line is sent; re-POSTing a
byte-identical record answers 200 with the original node id instead of 201.

Endpoints:

    POST /artifacts                         raw body + X-Artifact-Kind header
    POST /users /sources /datasets /environments /studies /tasks
         /ingests /processes /analyses      canonical record JSON
    GET  /health
    GET  /search?text=&kind=&tag=&user=&from=&to=&limit=
    GET  /lineage/{id}        GET /versions/{id}       GET /diff/{a}/{b}
    GET  /records/{id}        GET /upstream/{id}       GET /downstream/{id}
    GET  /projects/{study_id}
    GET  /audit/compliance/{model}?approved=s1,s2
    GET  /audit/repro/{analysis}   GET /audit/bias/{model}
    GET  /audit/evolution/{head}   GET /audit/health?threshold=

An optional static directory can be mounted for the web console; API paths
always win.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlsplit

from .canonical import canonical_json_bytes
from .catalog import SearchQuery
from .errors import (
    ConfigError,
    ConflictError,
    ModelLakeError,
    NotFoundError,
    QueryError,
    StorageError,
    ValidationFailed,
    Violation,
)
from .lake import ModelLake

REGISTRATION_PATHS = {
    "users": "user",
    "sources": "source",
    "datasets": "dataset",
    "environments": "environment",
    "studies": "study",
    "tasks": "task",
    "ingests": "ingest",
    "processes": "process",
    "analyses": "analysis",
}

_STATIC_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".map": "application/json",
    ".png": "image/png",
    ".ico": "image/x-icon",
}


@dataclass(frozen=True)
class ApiError:
    status: int
    code: str
    message: str
    violations: list | None = None

    def to_doc(self) -> dict:
        doc = {"status": self.status, "code": self.code, "message": self.message}
        if self.violations is not None:
            doc["violations"] = [v.to_doc() for v in self.violations]
        return doc


def error_for(exc: Exception) -> ApiError:
    if isinstance(exc, ValidationFailed):
        return ApiError(422, "validation_failed", str(exc), violations=exc.violations)
    if isinstance(exc, NotFoundError):
        return ApiError(404, "not_found", str(exc))
    if isinstance(exc, ConflictError):
        return ApiError(409, "conflict", str(exc))
    if isinstance(exc, QueryError):
        return ApiError(400, "bad_request", str(exc))
    if isinstance(exc, (StorageError, ConfigError, ModelLakeError)):
        return ApiError(500, "internal", str(exc))
    return ApiError(500, "internal", f"{type(exc).__name__}: {exc}")


class LakeRequestHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "modellake"

    # Shut off per-request stderr noise; the service is often a test subject.
    def log_message(self, format, *args):
        pass

    @property
    def lake(self) -> ModelLake:
        return self.server.lake  # type: ignore[attr-defined]

    def _send_bytes(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_doc(self, status: int, doc) -> None:
        self._send_bytes(status, canonical_json_bytes(doc), "application/json")

    def _send_error_doc(self, err: ApiError) -> None:
        self._send_doc(err.status, err.to_doc())

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type, X-Artifact-Kind")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_POST(self):
        try:
            url = urlsplit(self.path)
            parts = [unquote(p) for p in url.path.split("/") if p]
            if parts == ["artifacts"]:
                kind = self.headers.get("X-Artifact-Kind", "")
                if not kind:
                    raise QueryError("X-Artifact-Kind header is required")
                body = self._read_body()
                try:
                    blob_id, created = self.lake.put_blob_checked(body, kind)
                except ValueError as exc:
                    raise ValidationFailed([Violation("kind", "enum", str(exc))]) from None
                self._send_doc(201 if created else 200, {"id": str(blob_id)})
                return
            if len(parts) == 1 and parts[0] in REGISTRATION_PATHS:
                try:
                    payload = json.loads(self._read_body().decode("utf-8"))
                except (ValueError, UnicodeDecodeError) as exc:
                    raise QueryError(f"malformed JSON body: {exc}") from None
                if not isinstance(payload, dict):
                    raise QueryError("record body must be a JSON object")
                node_id, created = self.lake.register_payload(
                    REGISTRATION_PATHS[parts[0]], payload
                )
                self._send_doc(201 if created else 200, {"node_id": node_id})
                return
            raise NotFoundError(f"no such endpoint: POST {url.path}")
        except Exception as exc:  # boundary: every failure becomes an ApiError response
            self._send_error_doc(error_for(exc))

    def do_GET(self):
        try:
            url = urlsplit(self.path)
            params = parse_qs(url.query, keep_blank_values=True)
            parts = [unquote(p) for p in url.path.split("/") if p]
            doc = self._route_get(parts, params)
            if doc is not None:
                self._send_doc(200, doc)
                return
            if self._serve_static(url.path):
                return
            raise NotFoundError(f"no such endpoint: GET {url.path}")
        except Exception as exc:  # boundary: every failure becomes an ApiError response
            self._send_error_doc(error_for(exc))

    def _route_get(self, parts: list[str], params: dict):
        lake = self.lake
        if parts == ["health"]:
            return lake.health_doc()
        if parts == ["search"]:
            return lake.search_docs(SearchQuery.from_params(params))
        if len(parts) == 2 and parts[0] == "lineage":
            return lake.lineage_doc(parts[1])
        if len(parts) == 2 and parts[0] == "records":
            return lake.record_doc(parts[1])
        if len(parts) == 2 and parts[0] in ("upstream", "downstream"):
            return lake.traversal_doc(parts[1], parts[0])
        if len(parts) == 2 and parts[0] == "versions":
            return lake.versions_doc(parts[1])
        if len(parts) == 3 and parts[0] == "diff":
            return lake.diff_doc(parts[1], parts[2])
        if len(parts) == 2 and parts[0] == "projects":
            return lake.project_doc(parts[1])
        if len(parts) >= 2 and parts[0] == "audit":
            if parts[1:] == ["health"]:
                threshold = params.get("threshold", [""])[-1]
                try:
                    value = float(threshold) if threshold else None
                except ValueError:
                    raise QueryError(f"threshold must be a number, got {threshold!r}") from None
                return lake.lake_health_doc(value)
            if len(parts) == 3 and parts[1] == "compliance":
                approved_raw = ",".join(params.get("approved", []))
                approved = [s for s in approved_raw.split(",") if s]
                return lake.compliance_doc(parts[2], approved)
            if len(parts) == 3 and parts[1] == "repro":
                return lake.repro_doc(parts[2])
            if len(parts) == 3 and parts[1] == "bias":
                return lake.bias_doc(parts[2])
            if len(parts) == 3 and parts[1] == "evolution":
                return lake.evolution_doc(parts[2])
        return None

    def _serve_static(self, path: str) -> bool:
        static_root: Path | None = getattr(self.server, "static_root", None)
        if static_root is None:
            return False
        rel = unquote(path).lstrip("/") or "index.html"
        target = (static_root / rel).resolve()
        try:
            target.relative_to(static_root.resolve())
        except ValueError:
            return False
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            return False
        content_type = _STATIC_TYPES.get(target.suffix, "application/octet-stream")
        self._send_bytes(200, target.read_bytes(), content_type)
        return True


class LakeService:
    """Bound, running service; shut down with close()."""

    def __init__(
        self,
        data_dir,
        bind: str = "127.0.0.1:0",
        *,
        swamp_threshold: float | None = None,
        static_root: "Path | str | None" = None,
    ):
        host, _, port_text = bind.rpartition(":")
        if not host or not port_text:
            raise ConfigError(f"bind must look like host:port, got {bind!r}")
        try:
            port = int(port_text)
        except ValueError:
            raise ConfigError(f"bind port must be an integer, got {port_text!r}") from None
        try:
            self.server = ThreadingHTTPServer((host, port), LakeRequestHandler)
        except OSError as exc:
            raise ConfigError(f"cannot bind {bind}: {exc}") from exc
        self.server.daemon_threads = False  # finish in-flight requests on shutdown
        try:
            kwargs = {"create": True}
            if swamp_threshold is not None:
                kwargs["swamp_threshold"] = swamp_threshold
            self.lake = ModelLake(data_dir, **kwargs)
        except Exception:
            self.server.server_close()
            raise
        self.server.lake = self.lake  # type: ignore[attr-defined]
        self.server.static_root = Path(static_root) if static_root else None  # type: ignore[attr-defined]

    @property
    def address(self) -> str:
        host, port = self.server.server_address[:2]
        if isinstance(host, bytes):
            host = host.decode()
        return f"{host}:{port}"

    def serve_forever(self) -> None:
        self.server.serve_forever(poll_interval=0.05)

    def close(self) -> None:
        self.server.shutdown()
        self.server.server_close()
        self.lake.close()
