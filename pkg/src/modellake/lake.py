"""The lake facade: one data directory, one consistent view.

Owns the blob store, the record log, the lineage graph and the alias
registries, and funnels every mutation through a single commit sequence
(an RLock): validate, check graph preconditions, durably append to the
log, then apply to the derived state. Startup replays the log, so the
graph and indexes are always reconstructible from disk.

Layout of a data directory:

    modellake.json   marker {"version": 1}
    objects/         content-addressed blobs (see cas)
    records.log      append-only record envelopes (see log)
    .lock            advisory exclusive lock held while the lake is open
"""

from __future__ import annotations

import threading
from pathlib import Path

from . import catalog, governance
from .canonical import canonical_json_bytes
from .cas import ArtifactKind, BlobId, CasStore
from .completeness import completeness_5w1h
from .errors import (
    ConfigError,
    ConflictError,
    NotFoundError,
    ValidationFailed,
)
from .graph import LineageGraph, diff_versions
from .log import RecordLog
from .records import (
    AnalysisRecord,
    IngestRecord,
    ModelLakeDataset,
    ProcessRecord,
    Record,
    Study,
    parse_record,
    record_alias,
    record_payload,
    record_id,
    record_type_of,
    validate_record,
)

MARKER_NAME = "modellake.json"
DEFAULT_SWAMP_THRESHOLD = 0.5

_NODE_KIND_BY_TYPE = {
    "user": "user",
    "source": "source",
    "dataset": "dataset",
    "environment": "environment",
    "study": "study",
    "task": "task",
    "ingest": "ingest",
    "process": "process",
    "analysis": "analysis",
}


def init_data_dir(data_dir: "Path | str") -> Path:
    """Create an empty lake layout; idempotent on an existing lake."""
    root = Path(data_dir)
    marker = root / MARKER_NAME
    if root.exists() and any(root.iterdir()) and not marker.exists():
        raise ConfigError(f"{root} exists and is not a lake data directory")
    root.mkdir(parents=True, exist_ok=True)
    (root / "objects").mkdir(exist_ok=True)
    (root / "records.log").touch()
    if not marker.exists():
        marker.write_bytes(canonical_json_bytes({"version": 1}) + b"\n")
    return root


class ModelLake:
    """Open lake handle; use as a context manager to release the dir lock."""

    def __init__(
        self,
        data_dir: "Path | str",
        *,
        create: bool = False,
        swamp_threshold: float = DEFAULT_SWAMP_THRESHOLD,
        fsync: bool = True,
        lock: bool = True,
    ):
        self.data_dir = Path(data_dir)
        marker = self.data_dir / MARKER_NAME
        if not marker.exists():
            if not create:
                raise ConfigError(
                    f"{self.data_dir} is not a lake data directory (run 'mlk init' first)"
                )
            init_data_dir(self.data_dir)
        self.swamp_threshold = float(swamp_threshold)
        self.store = CasStore(self.data_dir / "objects")
        self.log = RecordLog(self.data_dir / "records.log", fsync=fsync)
        self._mutex = threading.RLock()
        self._lock_handle = None
        if lock:
            self._acquire_dir_lock()
        self.graph = LineageGraph()
        self._records: dict[str, Record] = {}
        self._payloads: dict[str, dict] = {}
        self._types: dict[str, str] = {}
        self._seq: dict[str, int] = {}
        self._aliases: dict[str, dict[str, str]] = {t: {} for t in _NODE_KIND_BY_TYPE}
        for record_type, payload in self.log.replay():
            record, _ = parse_record(record_type, payload)
            self._apply(record_type, record)

    # -- lifecycle -----------------------------------------------------------

    def _acquire_dir_lock(self) -> None:
        import fcntl

        path = self.data_dir / ".lock"
        handle = open(path, "a+")
        try:
            fcntl.flock(handle.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            handle.close()
            raise ConfigError(
                f"{self.data_dir} is locked by another writer"
            ) from None
        self._lock_handle = handle

    def close(self) -> None:
        if self._lock_handle is not None:
            self._lock_handle.close()
            self._lock_handle = None

    def __enter__(self) -> "ModelLake":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- resolver protocol (used by validate_record / completeness) ----------

    def lookup_record(self, record_type: str, alias: str) -> Record | None:
        node_id = self._aliases.get(record_type, {}).get(alias)
        if node_id is None and alias in self._types:
            # references may also use the content id directly
            if self._types[alias] == record_type:
                node_id = alias
        return self._records.get(node_id) if node_id else None

    def blob_kind(self, blob_ref: str) -> ArtifactKind | None:
        return self.store.blob_kind(blob_ref)

    def alias_binding(self, record_type: str, alias: str) -> str | None:
        return self._aliases.get(record_type, {}).get(alias)

    # -- blobs ---------------------------------------------------------------

    def put_blob(self, payload: bytes, kind: "ArtifactKind | str") -> BlobId:
        with self._mutex:
            return self.store.put_blob(payload, kind)

    def put_blob_checked(self, payload: bytes, kind: "ArtifactKind | str") -> tuple[BlobId, bool]:
        """put_blob plus a created flag, for 201-vs-200 at the API."""
        with self._mutex:
            existed = self.store.has_blob(BlobId.for_payload(payload))
            return self.store.put_blob(payload, kind), not existed

    def get_blob(self, blob_ref: "BlobId | str") -> bytes:
        return self.store.get_blob(blob_ref)

    def has_blob(self, blob_ref: "BlobId | str") -> bool:
        return self.store.has_blob(blob_ref)

    def verify_store(self) -> list[BlobId]:
        return self.store.verify_store()

    # -- registration ---------------------------------------------------------

    def register_payload(self, record_type: str, payload: dict) -> tuple[str, bool]:
        if record_type not in _NODE_KIND_BY_TYPE:
            raise NotFoundError(f"unknown record type: {record_type!r}")
        record, shape_violations = parse_record(record_type, payload)
        if shape_violations:
            raise ValidationFailed(shape_violations)
        return self.register(record)

    def register(self, record: Record) -> tuple[str, bool]:
        """Validate, persist and index one record.

        Returns (node_id, created); re-registering a byte-identical record
        is a no-op that reports created=False.
        """
        record_type = record_type_of(record)
        payload = record_payload(record)
        node_id = record_id(record)
        with self._mutex:
            if node_id in self._records:
                return node_id, False
            report = validate_record(record, self)
            if report:
                raise ValidationFailed(report.violations)
            self._check_graph_preconditions(record_type, record)
            self.log.append(record_type, payload)
            self._apply(record_type, record)
        return node_id, True

    def resolve_reference(self, record_type: str, alias: str) -> str:
        node_id = self._aliases[record_type].get(alias)
        if node_id is None and self._types.get(alias) == record_type:
            node_id = alias
        if node_id is None:
            raise ConflictError(f"unresolved {record_type} reference: {alias!r}")
        return node_id

    def _check_graph_preconditions(self, record_type: str, record: Record) -> None:
        """One-producer, linear-version and acyclicity checks, pre-commit."""
        if record_type == "dataset":
            assert isinstance(record, ModelLakeDataset)
            if record.previous_version:
                older = self.resolve_reference("dataset", record.previous_version)
                successor = self.graph.version_successor(older)
                if successor is not None:
                    raise ConflictError(
                        f"dataset {record.previous_version!r} already has a newer version"
                    )
        elif record_type == "ingest":
            assert isinstance(record, IngestRecord)
            target = self.resolve_reference("dataset", record.to_dataset)
            producer = self.graph.producer_of(target)
            if producer is not None:
                raise ConflictError(
                    f"dataset {record.to_dataset!r} already has a producing activity"
                )
            source = self.resolve_reference("source", record.from_source)
            if self.graph.would_cycle({source}, {target}):
                raise ConflictError("registration would create a provenance cycle")
        elif record_type == "process":
            assert isinstance(record, ProcessRecord)
            inputs = {self.resolve_reference("dataset", d) for d in record.source_datasets}
            outputs = set()
            for alias in record.target_datasets:
                target = self.resolve_reference("dataset", alias)
                producer = self.graph.producer_of(target)
                if producer is not None:
                    raise ConflictError(
                        f"dataset {alias!r} already has a producing activity"
                    )
                outputs.add(target)
            if self.graph.would_cycle(inputs, outputs):
                raise ConflictError("registration would create a provenance cycle")
        elif record_type == "analysis":
            assert isinstance(record, AnalysisRecord)
            model_node = record.model_path
            if model_node in self.graph:
                producer = self.graph.producer_of(model_node)
                if producer is not None:
                    raise ConflictError(
                        f"model {model_node} already has a generating analysis"
                    )
            if record.previous_version:
                older = self.resolve_reference("analysis", record.previous_version)
                if self.graph.version_successor(older) is not None:
                    raise ConflictError(
                        f"analysis {record.previous_version!r} already has a newer version"
                    )
            inputs = {self.resolve_reference("dataset", u.dataset) for u in record.used_datasets}
            if self.graph.would_cycle(inputs, {model_node}):
                raise ConflictError("registration would create a provenance cycle")
        elif record_type == "study":
            assert isinstance(record, Study)
            for alias in record.member_analyses:
                member = self.resolve_reference("analysis", alias)
                rec = self._records[member]
                if rec.study and rec.study != record.study_id:
                    raise ConflictError(
                        f"analysis {alias!r} already belongs to study {rec.study!r}"
                    )

    def _apply(self, record_type: str, record: Record) -> None:
        """Deterministic derived-state mutation; shared by commit and replay."""
        node_id = record_id(record)
        if node_id in self._records:
            return
        self._records[node_id] = record
        self._payloads[node_id] = record_payload(record)
        self._types[node_id] = record_type
        self._seq[node_id] = len(self._seq)
        alias = record_alias(record)
        if alias:
            self._aliases[record_type].setdefault(alias, node_id)
        self.graph.add_node(node_id, _NODE_KIND_BY_TYPE[record_type])

        resolve = self.resolve_reference
        if record_type == "dataset":
            assert isinstance(record, ModelLakeDataset)
            if record.previous_version:
                self.graph.add_edge(
                    node_id, resolve("dataset", record.previous_version), "previous_version"
                )
        elif record_type == "ingest":
            assert isinstance(record, IngestRecord)
            self.graph.add_edge(node_id, resolve("source", record.from_source), "ingest_from")
            self.graph.add_edge(node_id, resolve("dataset", record.to_dataset), "ingest_to")
            self.graph.add_edge(node_id, resolve("user", record.ingested_by), "attributed_to")
            if record.environment:
                self.graph.add_edge(
                    node_id, resolve("environment", record.environment), "in_environment"
                )
        elif record_type == "process":
            assert isinstance(record, ProcessRecord)
            for alias_ref in record.source_datasets:
                self.graph.add_edge(node_id, resolve("dataset", alias_ref), "used_data")
            for alias_ref in record.target_datasets:
                self.graph.add_edge(resolve("dataset", alias_ref), node_id, "derived_from")
            code_node = self.graph.add_node(record.code, "code")
            self.graph.add_edge(node_id, code_node.node_id, "used_code")
            self.graph.add_edge(node_id, resolve("user", record.executed_by), "attributed_to")
        elif record_type == "analysis":
            assert isinstance(record, AnalysisRecord)
            for use in record.used_datasets:
                self.graph.add_edge(
                    node_id, resolve("dataset", use.dataset), "used_data", split=use.split
                )
            model_node = self.graph.add_node(record.model_path, "model")
            self.graph.add_edge(node_id, model_node.node_id, "generated_model")
            code_node = self.graph.add_node(record.code, "code")
            self.graph.add_edge(node_id, code_node.node_id, "used_code")
            self.graph.add_edge(
                node_id, resolve("environment", record.environment), "in_environment"
            )
            self.graph.add_edge(node_id, resolve("user", record.performed_by), "attributed_to")
            if record.study:
                self.graph.add_edge(node_id, resolve("study", record.study), "member_of_study")
            if record.task:
                self.graph.add_edge(node_id, resolve("task", record.task), "addresses_task")
            if record.previous_version:
                self.graph.add_edge(
                    node_id, resolve("analysis", record.previous_version), "previous_version"
                )
        elif record_type == "study":
            assert isinstance(record, Study)
            for alias_ref in record.member_analyses:
                self.graph.add_edge(resolve("analysis", alias_ref), node_id, "member_of_study")

    # -- lookups ---------------------------------------------------------------

    @property
    def record_count(self) -> int:
        return len(self._records)

    def record_for_node(self, node_id: str) -> Record | None:
        return self._records.get(node_id)

    def payload_for_node(self, node_id: str) -> dict | None:
        return self._payloads.get(node_id)

    def type_for_node(self, node_id: str) -> str | None:
        return self._types.get(node_id)

    def seq_for_node(self, node_id: str) -> int:
        return self._seq.get(node_id, -1)

    def resolve_node(self, ref: str) -> str:
        """Map a node id, alias or blob id to a graph node id."""
        if ref in self.graph:
            return ref
        hits = sorted(
            {
                node_id
                for by_alias in self._aliases.values()
                for alias, node_id in by_alias.items()
                if alias == ref
            }
        )
        if len(hits) == 1:
            return hits[0]
        if len(hits) > 1:
            raise ConflictError(f"ambiguous reference {ref!r}: {', '.join(hits)}")
        raise NotFoundError(f"no such node: {ref}")

    def completeness_for(self, record: Record):
        return completeness_5w1h(record, self)

    # -- query documents (shared verbatim by CLI embedded mode and HTTP) -------

    def health_doc(self) -> dict:
        return {"status": "ok", "records": self.record_count}

    def search_docs(self, query: "catalog.SearchQuery") -> list[dict]:
        with self._mutex:
            return catalog.search(self, query)

    def project_doc(self, study_ref: str) -> dict:
        with self._mutex:
            return catalog.project_view(self, study_ref)

    def lineage_doc(self, node_ref: str) -> dict:
        with self._mutex:
            node_id = self.resolve_node(node_ref)
            return self.graph.bundle(node_id).to_doc()

    def record_doc(self, node_ref: str) -> dict:
        """Node descriptor plus the record payload (or blob meta for blobs)."""
        with self._mutex:
            node_id = self.resolve_node(node_ref)
            node = self.graph.node(node_id)
            doc = {
                "node_id": node_id,
                "node_class": node.node_class,
                "node_kind": node.node_kind,
                "record_type": self.type_for_node(node_id),
                "record": self.payload_for_node(node_id),
            }
            if doc["record_type"] is None:
                doc["record_type"] = "blob"
                doc["record"] = self.store.blob_meta(node_id).to_doc()
            return doc

    def traversal_doc(self, node_ref: str, direction: str) -> dict:
        with self._mutex:
            node_id = self.resolve_node(node_ref)
            walk = self.graph.upstream if direction == "upstream" else self.graph.downstream
            return {"focus": node_id, "direction": direction, "nodes": sorted(walk(node_id))}

    def versions_doc(self, node_ref: str) -> dict:
        with self._mutex:
            node_id = self.resolve_node(node_ref)
            return {"chain": self.graph.version_chain(node_id)}

    def diff_doc(self, a_ref: str, b_ref: str) -> dict:
        with self._mutex:
            a = self.resolve_node(a_ref)
            b = self.resolve_node(b_ref)
            return diff_versions(self.graph, a, b, self.payload_for_node).to_doc()

    def compliance_doc(self, model_ref: str, approved_sources) -> dict:
        with self._mutex:
            return governance.audit_compliance(self, model_ref, approved_sources).to_doc()

    def repro_doc(self, analysis_ref: str) -> dict:
        with self._mutex:
            return governance.reproducibility_closure(self, analysis_ref).to_doc()

    def bias_doc(self, model_ref: str) -> list[dict]:
        with self._mutex:
            return governance.bias_surface(self, model_ref)

    def evolution_doc(self, head_ref: str) -> list[dict]:
        with self._mutex:
            return governance.evolution_report(self, head_ref)

    def lake_health_doc(self, threshold: float | None = None) -> dict:
        with self._mutex:
            if threshold is None:
                threshold = self.swamp_threshold
            return governance.lake_health(self, threshold).to_doc()
