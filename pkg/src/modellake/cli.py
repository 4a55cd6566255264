"""The mlk command line: operate a lake embedded or over HTTP.

Every command runs in exactly one of two modes, picked by configuration:
embedded ("--data-dir", opens the directory under an exclusive lock) or
remote ("--endpoint", talks to a running service). With "--output json"
both modes print the identical canonical JSON bytes for the same lake
state; that equivalence is part of the contract, so remote mode prints
response bodies verbatim instead of re-serializing them.

Exit codes: 0 success, 1 validation/constraint failure, 2 not found,
3 IO or configuration error. Machine payloads go to stdout, human
messages to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import sys
import threading
import urllib.error
import urllib.parse
import urllib.request
from pathlib import Path

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
)
from .lake import ModelLake, init_data_dir
from .server import REGISTRATION_PATHS, LakeService, error_for

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NOT_FOUND = 2
EXIT_IO = 3

_RECORD_COMMANDS = {
    "ingest": "ingest",
    "register-user": "user",
    "register-source": "source",
    "register-dataset": "dataset",
    "register-environment": "environment",
    "register-study": "study",
    "register-task": "task",
    "register-process": "process",
    "register-analysis": "analysis",
}

_PATH_BY_TYPE = {rtype: path for path, rtype in REGISTRATION_PATHS.items()}


class _Config:
    def __init__(self, args):
        # Explicit flags win over MLK_* env defaults; exactly one mode applies.
        if args.data_dir and args.endpoint:
            raise ConfigError("choose one of --data-dir or --endpoint, not both")
        if args.endpoint:
            self.data_dir, self.endpoint = "", args.endpoint
        elif args.data_dir:
            self.data_dir, self.endpoint = args.data_dir, ""
        else:
            self.data_dir = os.environ.get("MLK_DATA_DIR") or ""
            self.endpoint = os.environ.get("MLK_ENDPOINT") or ""
            if self.data_dir and self.endpoint:
                raise ConfigError(
                    "both MLK_DATA_DIR and MLK_ENDPOINT are set; pass a flag to choose"
                )
        self.output = args.output or "table"
        threshold = args.swamp_threshold
        if threshold is None:
            raw = os.environ.get("MLK_SWAMP_THRESHOLD", "")
            threshold = float(raw) if raw else None
        self.swamp_threshold = threshold

    def require_mode(self) -> str:
        if self.endpoint:
            return "remote"
        if self.data_dir:
            return "embedded"
        raise ConfigError("no lake selected: pass --data-dir/--endpoint or set MLK_DATA_DIR")

    def open_lake(self) -> ModelLake:
        kwargs = {}
        if self.swamp_threshold is not None:
            kwargs["swamp_threshold"] = self.swamp_threshold
        return ModelLake(self.data_dir, **kwargs)


def _emit_json(doc) -> None:
    sys.stdout.buffer.write(canonical_json_bytes(doc) + b"\n")
    sys.stdout.buffer.flush()


def _emit_body(body: bytes) -> None:
    sys.stdout.buffer.write(body + b"\n")
    sys.stdout.buffer.flush()


def _render_table(doc, indent: str = "") -> None:
    if isinstance(doc, dict):
        for key in doc:
            value = doc[key]
            if isinstance(value, (dict, list)):
                print(f"{indent}{key}:")
                _render_table(value, indent + "  ")
            else:
                print(f"{indent}{key}: {value}")
    elif isinstance(doc, list):
        if not doc:
            print(f"{indent}(none)")
        for item in doc:
            if isinstance(item, (dict, list)):
                _render_table(item, indent + "  ")
                print(f"{indent}-")
            else:
                print(f"{indent}- {item}")
    else:
        print(f"{indent}{doc}")


def _emit(config: _Config, doc, body: bytes | None = None) -> None:
    if config.output == "json":
        if body is not None:
            _emit_body(body)
        else:
            _emit_json(doc)
    else:
        _render_table(doc)


def _exit_code_for(exc: Exception) -> int:
    if isinstance(exc, NotFoundError):
        return EXIT_NOT_FOUND
    if isinstance(exc, (ValidationFailed, ConflictError, QueryError)):
        return EXIT_VALIDATION
    return EXIT_IO


def _exit_code_for_status(status: int) -> int:
    if status == 404:
        return EXIT_NOT_FOUND
    if status in (400, 409, 422):
        return EXIT_VALIDATION
    return EXIT_IO


class _Remote:
    def __init__(self, endpoint: str):
        self.base = endpoint.rstrip("/")

    def request(self, method: str, path: str, body: bytes | None = None, headers=None) -> tuple[int, bytes]:
        req = urllib.request.Request(self.base + path, data=body, method=method)
        for key, value in (headers or {}).items():
            req.add_header(key, value)
        try:
            with urllib.request.urlopen(req) as resp:
                return resp.status, resp.read()
        except urllib.error.HTTPError as exc:
            return exc.code, exc.read()
        except urllib.error.URLError as exc:
            raise StorageError(f"cannot reach {self.base}: {exc.reason}") from exc

    def get_doc(self, path: str) -> tuple[int, bytes]:
        return self.request("GET", path)


def _quote(ref: str) -> str:
    return urllib.parse.quote(ref, safe="")


def _read_record_file(path: str) -> dict:
    try:
        raw = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read record file {path}: {exc}") from exc
    try:
        payload = json.loads(raw)
    except ValueError as exc:
        raise QueryError(f"record file {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise QueryError(f"record file {path} must hold a JSON object")
    return payload


def _run_remote_doc(config: _Config, path: str) -> int:
    status, body = _Remote(config.endpoint).get_doc(path)
    if status >= 400:
        return _report_remote_error(config, status, body)
    _emit(config, json.loads(body.decode("utf-8")), body=body)
    return EXIT_OK


def _report_remote_error(config: _Config, status: int, body: bytes) -> int:
    try:
        doc = json.loads(body.decode("utf-8"))
        message = doc.get("message", "") if isinstance(doc, dict) else ""
    except ValueError:
        doc, message = {"status": status, "code": "internal", "message": body.decode("utf-8", "replace")}, ""
        body = canonical_json_bytes(doc)
    print(f"error: {message or status}", file=sys.stderr)
    if config.output == "json":
        _emit_body(body)
    return _exit_code_for_status(status)


def _report_error(config: _Config, exc: Exception) -> int:
    err = error_for(exc)
    print(f"error: {err.message}", file=sys.stderr)
    if config.output == "json":
        _emit_json(err.to_doc())
    return _exit_code_for(exc)


# ---------------------------------------------------------------------------
# command implementations


def _cmd_init(config: _Config, args) -> int:
    root = init_data_dir(args.directory)
    _emit(config, {"data_dir": str(root), "status": "initialized"})
    return EXIT_OK


def _cmd_put(config: _Config, args) -> int:
    try:
        payload = sys.stdin.buffer.read() if args.file == "-" else Path(args.file).read_bytes()
    except OSError as exc:
        raise StorageError(f"cannot read {args.file}: {exc}") from exc
    if config.require_mode() == "remote":
        status, body = _Remote(config.endpoint).request(
            "POST",
            "/artifacts",
            body=payload,
            headers={"X-Artifact-Kind": args.kind, "Content-Type": "application/octet-stream"},
        )
        if status >= 400:
            return _report_remote_error(config, status, body)
        _emit(config, json.loads(body.decode("utf-8")), body=body)
        return EXIT_OK
    with config.open_lake() as lake:
        blob_id, _ = lake.put_blob_checked(payload, args.kind)
        _emit(config, {"id": str(blob_id)})
    return EXIT_OK


def _cmd_register(config: _Config, args, record_type: str) -> int:
    payload = _read_record_file(args.file)
    if config.require_mode() == "remote":
        status, body = _Remote(config.endpoint).request(
            "POST",
            f"/{_PATH_BY_TYPE[record_type]}",
            body=canonical_json_bytes(payload),
            headers={"Content-Type": "application/json"},
        )
        if status >= 400:
            return _report_remote_error(config, status, body)
        _emit(config, json.loads(body.decode("utf-8")), body=body)
        return EXIT_OK
    with config.open_lake() as lake:
        node_id, _ = lake.register_payload(record_type, payload)
        _emit(config, {"node_id": node_id})
    return EXIT_OK


def _search_params(args) -> list[tuple[str, str]]:
    params: list[tuple[str, str]] = []
    if args.text:
        params.append(("text", args.text))
    for kind in args.kind or []:
        params.append(("kind", kind))
    for tag in args.tag or []:
        params.append(("tag", tag))
    if args.user:
        params.append(("user", args.user))
    if getattr(args, "date_from", ""):
        params.append(("from", args.date_from))
    if getattr(args, "date_to", ""):
        params.append(("to", args.date_to))
    if args.limit is not None:
        params.append(("limit", str(args.limit)))
    return params


def _cmd_search(config: _Config, args) -> int:
    params = _search_params(args)
    if config.require_mode() == "remote":
        query = urllib.parse.urlencode(params)
        return _run_remote_doc(config, f"/search?{query}")
    grouped: dict[str, list[str]] = {}
    for key, value in params:
        grouped.setdefault(key, []).append(value)
    with config.open_lake() as lake:
        _emit(config, lake.search_docs(SearchQuery.from_params(grouped)))
    return EXIT_OK


def _cmd_simple_lookup(config: _Config, path_builder, embedded_call) -> int:
    if config.require_mode() == "remote":
        return _run_remote_doc(config, path_builder())
    with config.open_lake() as lake:
        _emit(config, embedded_call(lake))
    return EXIT_OK


def _cmd_serve(config: _Config, args) -> int:
    if not config.data_dir:
        raise ConfigError("serve needs --data-dir or MLK_DATA_DIR")
    bind = args.bind or os.environ.get("MLK_BIND") or "127.0.0.1:8080"
    service = LakeService(
        config.data_dir,
        bind,
        swamp_threshold=config.swamp_threshold,
        static_root=args.console_dir or os.environ.get("MLK_CONSOLE_DIR") or None,
    )
    # serve_forever runs on a worker so the signal handler never has to call
    # shutdown() from inside the serving thread (which would deadlock).
    stop = threading.Event()
    for signum in (signal.SIGINT, signal.SIGTERM):
        signal.signal(signum, lambda *_: stop.set())
    worker = threading.Thread(target=service.serve_forever, daemon=True)
    worker.start()
    print(f"listening on http://{service.address}", flush=True)
    stop.wait()
    service.close()
    worker.join(timeout=5)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_common(parser: argparse.ArgumentParser, *, suppress: bool = False) -> None:
    # Subparsers use SUPPRESS so an unset option never clobbers the value
    # parsed from before the subcommand.
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--data-dir", default=default, help="lake directory (embedded mode)")
    parser.add_argument("--endpoint", default=default, help="service base URL (remote mode)")
    parser.add_argument("--output", choices=("json", "table"), default=default)
    parser.add_argument("--swamp-threshold", type=float, default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlk", description="model lake operator CLI")
    _add_common(parser)  # before-subcommand position
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create an empty lake directory")
    p.add_argument("directory")
    _add_common(p, suppress=True)

    p = sub.add_parser("put", help="store a file as a content-addressed blob")
    p.add_argument("file")
    p.add_argument("--kind", required=True)
    _add_common(p, suppress=True)

    for command in _RECORD_COMMANDS:
        p = sub.add_parser(command, help=f"register a {_RECORD_COMMANDS[command]} record")
        p.add_argument("-f", "--file", required=True, help="record JSON file, or - for stdin")
        _add_common(p, suppress=True)

    p = sub.add_parser("search", help="search the catalog")
    p.add_argument("--text", default="")
    p.add_argument("--kind", action="append")
    p.add_argument("--tag", action="append")
    p.add_argument("--user", default="")
    p.add_argument("--from", dest="date_from", default="")
    p.add_argument("--to", dest="date_to", default="")
    p.add_argument("--limit", type=int, default=None)
    _add_common(p, suppress=True)

    p = sub.add_parser("lineage", help="provenance bundle of a node")
    p.add_argument("node")
    p.add_argument("--format", choices=("json",), default=None, help="force JSON output")
    _add_common(p, suppress=True)

    p = sub.add_parser("versions", help="version chain containing a node")
    p.add_argument("node")
    _add_common(p, suppress=True)

    p = sub.add_parser("diff", help="field and upstream differences of two versions")
    p.add_argument("a")
    p.add_argument("b")
    _add_common(p, suppress=True)

    p = sub.add_parser("project", help="three-section project view of a study")
    p.add_argument("study")
    _add_common(p, suppress=True)

    audit = sub.add_parser("audit", help="governance audits")
    audit_sub = audit.add_subparsers(dest="audit_command", required=True)
    p = audit_sub.add_parser("compliance")
    p.add_argument("model")
    p.add_argument("--approved", default="", help="comma-separated approved source ids")
    _add_common(p, suppress=True)
    p = audit_sub.add_parser("repro")
    p.add_argument("analysis")
    _add_common(p, suppress=True)
    p = audit_sub.add_parser("bias")
    p.add_argument("model")
    _add_common(p, suppress=True)
    p = audit_sub.add_parser("evolution")
    p.add_argument("head")
    _add_common(p, suppress=True)
    p = audit_sub.add_parser("health")
    p.add_argument("--threshold", type=float, default=None)
    _add_common(p, suppress=True)

    p = sub.add_parser("serve", help="run the HTTP service over a lake directory")
    p.add_argument("--bind", default=None, help="host:port (default 127.0.0.1:8080)")
    p.add_argument("--console-dir", default=None, help="static directory for the web console")
    _add_common(p, suppress=True)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "format", None) == "json":
        args.output = "json"
    try:
        config = _Config(args)
    except ModelLakeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        command = args.command
        if command == "init":
            return _cmd_init(config, args)
        if command == "put":
            config.require_mode()
            return _cmd_put(config, args)
        if command in _RECORD_COMMANDS:
            config.require_mode()
            return _cmd_register(config, args, _RECORD_COMMANDS[command])
        if command == "search":
            config.require_mode()
            return _cmd_search(config, args)
        if command == "lineage":
            config.require_mode()
            return _cmd_simple_lookup(
                config,
                lambda: f"/lineage/{_quote(args.node)}",
                lambda lake: lake.lineage_doc(args.node),
            )
        if command == "versions":
            config.require_mode()
            return _cmd_simple_lookup(
                config,
                lambda: f"/versions/{_quote(args.node)}",
                lambda lake: lake.versions_doc(args.node),
            )
        if command == "diff":
            config.require_mode()
            return _cmd_simple_lookup(
                config,
                lambda: f"/diff/{_quote(args.a)}/{_quote(args.b)}",
                lambda lake: lake.diff_doc(args.a, args.b),
            )
        if command == "project":
            config.require_mode()
            return _cmd_simple_lookup(
                config,
                lambda: f"/projects/{_quote(args.study)}",
                lambda lake: lake.project_doc(args.study),
            )
        if command == "audit":
            config.require_mode()
            sub_command = args.audit_command
            if sub_command == "compliance":
                approved = [s for s in args.approved.split(",") if s]
                return _cmd_simple_lookup(
                    config,
                    lambda: (
                        f"/audit/compliance/{_quote(args.model)}"
                        f"?approved={urllib.parse.quote(args.approved)}"
                    ),
                    lambda lake: lake.compliance_doc(args.model, approved),
                )
            if sub_command == "repro":
                return _cmd_simple_lookup(
                    config,
                    lambda: f"/audit/repro/{_quote(args.analysis)}",
                    lambda lake: lake.repro_doc(args.analysis),
                )
            if sub_command == "bias":
                return _cmd_simple_lookup(
                    config,
                    lambda: f"/audit/bias/{_quote(args.model)}",
                    lambda lake: lake.bias_doc(args.model),
                )
            if sub_command == "evolution":
                return _cmd_simple_lookup(
                    config,
                    lambda: f"/audit/evolution/{_quote(args.head)}",
                    lambda lake: lake.evolution_doc(args.head),
                )
            if sub_command == "health":
                threshold = args.threshold
                return _cmd_simple_lookup(
                    config,
                    lambda: (
                        "/audit/health"
                        + (f"?threshold={threshold}" if threshold is not None else "")
                    ),
                    lambda lake: lake.lake_health_doc(threshold),
                )
        if command == "serve":
            return _cmd_serve(config, args)
        raise ConfigError(f"unknown command: {command}")
    except ModelLakeError as exc:
        return _report_error(config, exc)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
