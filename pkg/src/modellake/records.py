"""Domain record types for the two 5W1H metadata models, with validation.

One frozen dataclass per metadata class (DatasetSource, Ingest, User,
ModelLakeDataset, DatasetMetafeatures, Tag, Process, ProcessingOperation,
Analysis, Study, Task, Environment, Algorithm, Parameter). Records are
immutable values; a "modification" is a new record carrying a
previous_version reference. Cross-record references are stored as the
target's human-friendly id string (user_id, dataset_id, ...) or a rendered
BlobId, and are resolved against the lake at validation time.

``record_payload`` produces the canonical serialization dict: unset
optionals (None, empty string, empty list, empty map) are omitted, numeric
and boolean values are always kept, and field names are exactly the
snake_case names below, which is the bit-exact wire and persistence format.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, is_dataclass
from typing import Any, Callable, Mapping, Protocol

from .canonical import canonical_json_bytes, normalize_timestamp, record_id_for
from .cas import ArtifactKind, BlobId
from .errors import Violation

ROLES = ("data_engineer", "data_scientist", "data_analyst", "bi_professional", "other")
INGEST_MODES = ("batch", "streaming", "manual")
OP_KINDS = ("integration", "cleaning", "transformation", "reduction")
SPLITS = ("train", "validation", "test", "full")
VALUE_TYPES = ("int", "float", "string", "bool")


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class User:
    user_id: str
    name: str = ""
    role: str = "other"


@dataclass(frozen=True)
class Tag:
    """Case-preserved label; equality and search are case-insensitive."""

    label: str

    def folded(self) -> str:
        return self.label.casefold()


@dataclass(frozen=True)
class DatasetSource:
    source_id: str
    name: str = ""
    source_type: str = ""
    description: str = ""
    owner: str = ""  # user_id
    location: str = ""
    created_at: str = ""


@dataclass(frozen=True)
class AttributeDescriptor:
    attribute_name: str
    declared_type: str = ""
    missing_fraction: float = 0.0


@dataclass(frozen=True)
class DatasetMetafeatures:
    n_rows: int = 0
    n_attributes: int = 0
    per_attribute_descriptors: tuple[AttributeDescriptor, ...] = ()
    extra: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class SchemaAttribute:
    name: str
    declared_type: str = ""


@dataclass(frozen=True)
class ModelLakeDataset:
    dataset_id: str
    name: str = ""
    format: str = ""
    description: str = ""
    tags: tuple[str, ...] = ()
    attributes: tuple[SchemaAttribute, ...] = ()
    location: str = ""  # BlobId of the payload, kind=dataset
    created_at: str = ""
    metafeatures: DatasetMetafeatures | None = None
    source: str = ""  # source_id, optional for derived datasets
    previous_version: str = ""  # dataset_id of the prior version


@dataclass(frozen=True)
class IngestRecord:
    ingest_id: str
    mode: str = ""
    comments: str = ""
    from_source: str = ""  # source_id
    to_dataset: str = ""  # dataset_id
    ingested_by: str = ""  # user_id
    access_url: str = ""
    ingested_at: str = ""
    environment: str = ""  # env_id, optional


@dataclass(frozen=True)
class ProcessingOperation:
    op_kind: str
    parameters: Mapping[str, str] = field(default_factory=dict)
    order_index: int = 0


@dataclass(frozen=True)
class ProcessRecord:
    process_id: str
    name: str = ""
    description: str = ""  # the business "why"
    language_program: str = ""
    code: str = ""  # BlobId, kind=code
    created_at: str = ""
    last_modified_at: str = ""
    source_datasets: tuple[str, ...] = ()
    target_datasets: tuple[str, ...] = ()
    operations: tuple[ProcessingOperation, ...] = ()
    executed_by: str = ""  # user_id


@dataclass(frozen=True)
class Environment:
    env_id: str
    name: str = ""
    runtime_descriptors: Mapping[str, str] = field(default_factory=dict)
    hardware: str = ""


@dataclass(frozen=True)
class Algorithm:
    name: str
    family: str = ""


@dataclass(frozen=True)
class Parameter:
    name: str
    value: str = ""
    value_type: str = "string"


@dataclass(frozen=True)
class Study:
    study_id: str
    description: str = ""
    study_type: str = ""
    member_analyses: tuple[str, ...] = ()


@dataclass(frozen=True)
class TaskRecord:
    task_id: str
    description: str = ""
    task_type: str = ""


@dataclass(frozen=True)
class DatasetUse:
    dataset: str  # dataset_id
    split: str = "full"


@dataclass(frozen=True)
class AnalysisRecord:
    analysis_id: str
    description: str = ""
    analysis_type: str = ""
    performed_by: str = ""  # user_id
    study: str = ""  # study_id, optional
    task: str = ""  # task_id, optional
    model_path: str = ""  # BlobId, kind=model
    code: str = ""  # BlobId, kind=code
    language_program: str = ""
    environment: str = ""  # env_id
    algorithm: Algorithm | None = None
    parameters: tuple[Parameter, ...] = ()
    used_datasets: tuple[DatasetUse, ...] = ()
    target_feature: str = ""
    performance: Mapping[str, float] = field(default_factory=dict)
    performed_at: str = ""
    previous_version: str = ""  # analysis_id of the prior version


Record = (
    User
    | DatasetSource
    | ModelLakeDataset
    | IngestRecord
    | ProcessRecord
    | Environment
    | Study
    | TaskRecord
    | AnalysisRecord
)

RECORD_TYPES: dict[str, type] = {
    "user": User,
    "source": DatasetSource,
    "dataset": ModelLakeDataset,
    "ingest": IngestRecord,
    "process": ProcessRecord,
    "environment": Environment,
    "study": Study,
    "task": TaskRecord,
    "analysis": AnalysisRecord,
}

ALIAS_FIELDS: dict[str, str] = {
    "user": "user_id",
    "source": "source_id",
    "dataset": "dataset_id",
    "ingest": "ingest_id",
    "process": "process_id",
    "environment": "env_id",
    "study": "study_id",
    "task": "task_id",
    "analysis": "analysis_id",
}

TIMESTAMP_FIELDS: dict[str, str] = {
    "source": "created_at",
    "dataset": "created_at",
    "ingest": "ingested_at",
    "process": "created_at",
    "analysis": "performed_at",
}


def record_type_of(record: Record) -> str:
    for name, cls in RECORD_TYPES.items():
        if type(record) is cls:
            return name
    raise TypeError(f"not a registrable record: {type(record).__name__}")


def record_alias(record: Record) -> str:
    return getattr(record, ALIAS_FIELDS[record_type_of(record)])


# ---------------------------------------------------------------------------
# Canonical payloads


def _payload_value(value: Any) -> Any:
    if is_dataclass(value) and not isinstance(value, type):
        doc = {}
        for f in fields(value):
            item = _payload_value(getattr(value, f.name))
            if item is None:
                continue
            doc[f.name] = item
        return doc or None
    if isinstance(value, (list, tuple)):
        items = [_payload_value(v) for v in value]
        items = [v for v in items if v is not None]
        return items or None
    if isinstance(value, Mapping):
        doc = {str(k): _payload_value(v) for k, v in value.items()}
        doc = {k: v for k, v in doc.items() if v is not None}
        return doc or None
    if value is None or (isinstance(value, str) and not value):
        return None
    return value


def record_payload(record: Record) -> dict:
    """Canonical serialization dict: unset optionals omitted."""
    doc = _payload_value(record)
    return doc if isinstance(doc, dict) else {}


def canonical_record_bytes(record: Record) -> bytes:
    return canonical_json_bytes(record_payload(record))


def record_id(record: Record) -> str:
    return record_id_for(record_payload(record))


# ---------------------------------------------------------------------------
# Parsing (payload dict -> record), collecting shape violations


class _Reader:
    def __init__(self, payload: Mapping, prefix: str = ""):
        self.data = dict(payload)
        self.prefix = prefix
        self.violations: list[Violation] = []

    def _name(self, key: str) -> str:
        return f"{self.prefix}{key}"

    def flag(self, key: str, rule: str, message: str) -> None:
        self.violations.append(Violation(self._name(key), rule, message))

    def string(self, key: str, default: str = "") -> str:
        value = self.data.pop(key, default)
        if value is None:
            return default
        if not isinstance(value, str):
            self.flag(key, "type", f"expected a string, got {type(value).__name__}")
            return default
        return value

    def timestamp(self, key: str) -> str:
        raw = self.string(key)
        if not raw:
            return ""
        normalized = normalize_timestamp(raw)
        # Malformed values are kept verbatim; validate_record reports them.
        return normalized if normalized is not None else raw

    def integer(self, key: str, default: int = 0) -> int:
        value = self.data.pop(key, default)
        if value is None:
            return default
        if isinstance(value, bool) or not isinstance(value, int):
            self.flag(key, "type", f"expected an integer, got {type(value).__name__}")
            return default
        return value

    def number(self, key: str, default: float = 0.0) -> float:
        value = self.data.pop(key, default)
        if value is None:
            return default
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.flag(key, "type", f"expected a number, got {type(value).__name__}")
            return default
        return float(value)

    def string_list(self, key: str) -> tuple[str, ...]:
        value = self.data.pop(key, None)
        if value is None:
            return ()
        if not isinstance(value, list):
            self.flag(key, "type", f"expected a list of strings, got {type(value).__name__}")
            return ()
        out = []
        for i, item in enumerate(value):
            if not isinstance(item, str):
                self.flag(f"{key}[{i}]", "type", "expected a string")
                continue
            out.append(item)
        return tuple(out)

    def string_map(self, key: str) -> dict[str, str]:
        value = self.data.pop(key, None)
        if value is None:
            return {}
        if not isinstance(value, Mapping):
            self.flag(key, "type", f"expected an object, got {type(value).__name__}")
            return {}
        out = {}
        for k, v in value.items():
            if not isinstance(v, str):
                self.flag(f"{key}.{k}", "type", "expected a string value")
                continue
            out[str(k)] = v
        return out

    def number_map(self, key: str) -> dict[str, float]:
        value = self.data.pop(key, None)
        if value is None:
            return {}
        if not isinstance(value, Mapping):
            self.flag(key, "type", f"expected an object, got {type(value).__name__}")
            return {}
        out = {}
        for k, v in value.items():
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                self.flag(f"{key}.{k}", "type", "expected a numeric value")
                continue
            out[str(k)] = float(v)
        return out

    def object_list(self, key: str, parse: Callable[["_Reader"], Any]) -> tuple:
        value = self.data.pop(key, None)
        if value is None:
            return ()
        if not isinstance(value, list):
            self.flag(key, "type", f"expected a list of objects, got {type(value).__name__}")
            return ()
        out = []
        for i, item in enumerate(value):
            if not isinstance(item, Mapping):
                self.flag(f"{key}[{i}]", "type", "expected an object")
                continue
            child = _Reader(item, prefix=f"{self._name(key)}[{i}].")
            out.append(parse(child))
            child.finish()
            self.violations.extend(child.violations)
        return tuple(out)

    def object(self, key: str, parse: Callable[["_Reader"], Any]) -> Any:
        value = self.data.pop(key, None)
        if value is None:
            return None
        if not isinstance(value, Mapping):
            self.flag(key, "type", f"expected an object, got {type(value).__name__}")
            return None
        child = _Reader(value, prefix=f"{self._name(key)}.")
        parsed = parse(child)
        child.finish()
        self.violations.extend(child.violations)
        return parsed

    def finish(self) -> None:
        self.data.pop("record_id", None)
        for key in sorted(self.data):
            self.flag(key, "unknown_field", "not a field of this record type")


def _parse_attribute_descriptor(r: _Reader) -> AttributeDescriptor:
    return AttributeDescriptor(
        attribute_name=r.string("attribute_name"),
        declared_type=r.string("declared_type"),
        missing_fraction=r.number("missing_fraction"),
    )


def _parse_metafeatures(r: _Reader) -> DatasetMetafeatures:
    return DatasetMetafeatures(
        n_rows=r.integer("n_rows"),
        n_attributes=r.integer("n_attributes"),
        per_attribute_descriptors=r.object_list(
            "per_attribute_descriptors", _parse_attribute_descriptor
        ),
        extra=r.number_map("extra"),
    )


def _parse_schema_attribute(r: _Reader) -> SchemaAttribute:
    return SchemaAttribute(name=r.string("name"), declared_type=r.string("declared_type"))


def _parse_operation(r: _Reader) -> ProcessingOperation:
    return ProcessingOperation(
        op_kind=r.string("op_kind"),
        parameters=r.string_map("parameters"),
        order_index=r.integer("order_index"),
    )


def _parse_algorithm(r: _Reader) -> Algorithm:
    return Algorithm(name=r.string("name"), family=r.string("family"))


def _parse_parameter(r: _Reader) -> Parameter:
    return Parameter(
        name=r.string("name"),
        value=r.string("value"),
        value_type=r.string("value_type", "string"),
    )


def _parse_dataset_use(r: _Reader) -> DatasetUse:
    return DatasetUse(dataset=r.string("dataset"), split=r.string("split", "full"))


def _parse_user(r: _Reader) -> User:
    return User(user_id=r.string("user_id"), name=r.string("name"), role=r.string("role", "other"))


def _parse_source(r: _Reader) -> DatasetSource:
    return DatasetSource(
        source_id=r.string("source_id"),
        name=r.string("name"),
        source_type=r.string("source_type"),
        description=r.string("description"),
        owner=r.string("owner"),
        location=r.string("location"),
        created_at=r.timestamp("created_at"),
    )


def _parse_dataset(r: _Reader) -> ModelLakeDataset:
    return ModelLakeDataset(
        dataset_id=r.string("dataset_id"),
        name=r.string("name"),
        format=r.string("format"),
        description=r.string("description"),
        tags=r.string_list("tags"),
        attributes=r.object_list("attributes", _parse_schema_attribute),
        location=r.string("location"),
        created_at=r.timestamp("created_at"),
        metafeatures=r.object("metafeatures", _parse_metafeatures),
        source=r.string("source"),
        previous_version=r.string("previous_version"),
    )


def _parse_ingest(r: _Reader) -> IngestRecord:
    return IngestRecord(
        ingest_id=r.string("ingest_id"),
        mode=r.string("mode"),
        comments=r.string("comments"),
        from_source=r.string("from_source"),
        to_dataset=r.string("to_dataset"),
        ingested_by=r.string("ingested_by"),
        access_url=r.string("access_url"),
        ingested_at=r.timestamp("ingested_at"),
        environment=r.string("environment"),
    )


def _parse_process(r: _Reader) -> ProcessRecord:
    return ProcessRecord(
        process_id=r.string("process_id"),
        name=r.string("name"),
        description=r.string("description"),
        language_program=r.string("language_program"),
        code=r.string("code"),
        created_at=r.timestamp("created_at"),
        last_modified_at=r.timestamp("last_modified_at"),
        source_datasets=r.string_list("source_datasets"),
        target_datasets=r.string_list("target_datasets"),
        operations=r.object_list("operations", _parse_operation),
        executed_by=r.string("executed_by"),
    )


def _parse_environment(r: _Reader) -> Environment:
    return Environment(
        env_id=r.string("env_id"),
        name=r.string("name"),
        runtime_descriptors=r.string_map("runtime_descriptors"),
        hardware=r.string("hardware"),
    )


def _parse_study(r: _Reader) -> Study:
    return Study(
        study_id=r.string("study_id"),
        description=r.string("description"),
        study_type=r.string("study_type"),
        member_analyses=r.string_list("member_analyses"),
    )


def _parse_task(r: _Reader) -> TaskRecord:
    return TaskRecord(
        task_id=r.string("task_id"),
        description=r.string("description"),
        task_type=r.string("task_type"),
    )


def _parse_analysis(r: _Reader) -> AnalysisRecord:
    return AnalysisRecord(
        analysis_id=r.string("analysis_id"),
        description=r.string("description"),
        analysis_type=r.string("analysis_type"),
        performed_by=r.string("performed_by"),
        study=r.string("study"),
        task=r.string("task"),
        model_path=r.string("model_path"),
        code=r.string("code"),
        language_program=r.string("language_program"),
        environment=r.string("environment"),
        algorithm=r.object("algorithm", _parse_algorithm),
        parameters=r.object_list("parameters", _parse_parameter),
        used_datasets=r.object_list("used_datasets", _parse_dataset_use),
        target_feature=r.string("target_feature"),
        performance=r.number_map("performance"),
        performed_at=r.timestamp("performed_at"),
        previous_version=r.string("previous_version"),
    )


_PARSERS: dict[str, Callable[[_Reader], Record]] = {
    "user": _parse_user,
    "source": _parse_source,
    "dataset": _parse_dataset,
    "ingest": _parse_ingest,
    "process": _parse_process,
    "environment": _parse_environment,
    "study": _parse_study,
    "task": _parse_task,
    "analysis": _parse_analysis,
}


def parse_record(record_type: str, payload: Mapping) -> tuple[Record, list[Violation]]:
    """Build a record from a payload dict; shape problems become violations."""
    if record_type not in _PARSERS:
        raise ValueError(f"unknown record type: {record_type!r}")
    if not isinstance(payload, Mapping):
        raise ValueError("record payload must be a JSON object")
    reader = _Reader(payload)
    record = _PARSERS[record_type](reader)
    reader.finish()
    return record, reader.violations


# ---------------------------------------------------------------------------
# Validation


class Resolver(Protocol):
    """Lookup context the lake provides to resolve references."""

    def lookup_record(self, record_type: str, alias: str) -> Record | None: ...

    def blob_kind(self, blob_ref: str) -> ArtifactKind | None: ...

    def alias_binding(self, record_type: str, alias: str) -> str | None: ...


class EmptyResolver:
    """Resolves nothing; standalone validation against an empty lake."""

    def lookup_record(self, record_type: str, alias: str) -> Record | None:
        return None

    def blob_kind(self, blob_ref: str) -> ArtifactKind | None:
        return None

    def alias_binding(self, record_type: str, alias: str) -> str | None:
        return None


class ValidationReport:
    """Ordered list of violations; empty (falsy) means the record is clean."""

    def __init__(self, violations: list[Violation] | None = None):
        self.violations = list(violations or [])

    def __bool__(self) -> bool:
        return bool(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def to_doc(self) -> list[dict]:
        return [v.to_doc() for v in self.violations]


class _Checker:
    def __init__(self, resolver: Resolver):
        self.resolver = resolver
        self.violations: list[Violation] = []

    def flag(self, field_name: str, rule: str, message: str) -> None:
        self.violations.append(Violation(field_name, rule, message))

    def required(self, field_name: str, value) -> bool:
        if not value:
            self.flag(field_name, "required", "must be present and non-empty")
            return False
        return True

    def enum(self, field_name: str, value: str, allowed: tuple[str, ...], required=False):
        if not value:
            if required:
                self.flag(field_name, "required", "must be present and non-empty")
            return
        if value not in allowed:
            self.flag(field_name, "enum", f"must be one of {', '.join(allowed)}")

    def timestamp(self, field_name: str, value: str, required=False):
        if not value:
            if required:
                self.flag(field_name, "required", "must carry an RFC 3339 UTC timestamp")
            return
        if normalize_timestamp(value) is None:
            self.flag(field_name, "timestamp", f"malformed timestamp: {value!r}")

    def reference(self, field_name: str, record_type: str, alias: str, required=False) -> Record | None:
        if not alias:
            if required:
                self.flag(field_name, "required", f"must reference a registered {record_type}")
            return None
        target = self.resolver.lookup_record(record_type, alias)
        if target is None:
            self.flag(field_name, "reference", f"unresolved {record_type} reference: {alias!r}")
        return target

    def blob(self, field_name: str, blob_ref: str, expected: ArtifactKind, required=False):
        if not blob_ref:
            if required:
                self.flag(field_name, "required", "must reference a stored blob")
            return
        try:
            BlobId.parse(blob_ref)
        except ValueError:
            self.flag(field_name, "blob_id", f"not a valid blob id: {blob_ref!r}")
            return
        kind = self.resolver.blob_kind(blob_ref)
        if kind is None:
            self.flag(field_name, "reference", f"blob not stored: {blob_ref}")
        elif kind is not expected:
            self.flag(
                field_name,
                "kind",
                f"{field_name} kind mismatch: expected {expected.value}, blob is {kind.value}",
            )

    def alias_unique(self, field_name: str, record_type: str, alias: str, own_id: str):
        if not alias:
            return
        bound = self.resolver.alias_binding(record_type, alias)
        if bound is not None and bound != own_id:
            self.flag(
                field_name,
                "unique",
                f"{field_name} {alias!r} is already bound to a different record",
            )

    def tags(self, field_name: str, labels: tuple[str, ...]):
        seen = set()
        for i, label in enumerate(labels):
            if not label:
                self.flag(f"{field_name}[{i}]", "tag", "tag labels must be non-empty")
                continue
            if label != label.strip():
                self.flag(
                    f"{field_name}[{i}]", "tag", "tag labels must not carry surrounding whitespace"
                )
            folded = label.casefold()
            if folded in seen:
                self.flag(f"{field_name}[{i}]", "unique", f"duplicate tag {label!r}")
            seen.add(folded)


def _validate_metafeatures(c: _Checker, mf: DatasetMetafeatures, prefix: str):
    if mf.n_rows < 0:
        c.flag(f"{prefix}.n_rows", "range", "must be non-negative")
    if mf.n_attributes < 0:
        c.flag(f"{prefix}.n_attributes", "range", "must be non-negative")
    seen = set()
    for i, attr in enumerate(mf.per_attribute_descriptors):
        where = f"{prefix}.per_attribute_descriptors[{i}]"
        if not attr.attribute_name:
            c.flag(f"{where}.attribute_name", "required", "must be present and non-empty")
        elif attr.attribute_name in seen:
            c.flag(f"{where}.attribute_name", "unique", f"duplicate attribute {attr.attribute_name!r}")
        seen.add(attr.attribute_name)
        if not 0.0 <= attr.missing_fraction <= 1.0:
            c.flag(f"{where}.missing_fraction", "range", "must lie within [0, 1]")
    for key, value in mf.extra.items():
        if not math.isfinite(value):
            c.flag(f"{prefix}.extra.{key}", "finite", "must be a finite number")


def validate_record(record: Record, resolver: Resolver | None = None) -> ValidationReport:
    """Check every type invariant and resolve every reference.

    Never mutates or raises on bad content; the report lists one entry per
    broken rule, each naming the field and the rule so the fix is mechanical.
    """
    c = _Checker(resolver or EmptyResolver())
    rtype = record_type_of(record)
    own_id = record_id(record)
    alias_field = ALIAS_FIELDS[rtype]
    alias = record_alias(record)
    if c.required(alias_field, alias):
        c.alias_unique(alias_field, rtype, alias, own_id)

    if isinstance(record, User):
        c.enum("role", record.role, ROLES)

    elif isinstance(record, DatasetSource):
        c.timestamp("created_at", record.created_at)
        c.reference("owner", "user", record.owner)

    elif isinstance(record, ModelLakeDataset):
        c.blob("location", record.location, ArtifactKind.DATASET, required=True)
        c.timestamp("created_at", record.created_at)
        c.tags("tags", record.tags)
        for i, attr in enumerate(record.attributes):
            if not attr.name:
                c.flag(f"attributes[{i}].name", "required", "must be present and non-empty")
        if record.metafeatures is not None:
            _validate_metafeatures(c, record.metafeatures, "metafeatures")
        c.reference("source", "source", record.source)
        c.reference("previous_version", "dataset", record.previous_version)

    elif isinstance(record, IngestRecord):
        c.enum("mode", record.mode, INGEST_MODES)
        c.reference("from_source", "source", record.from_source, required=True)
        c.reference("to_dataset", "dataset", record.to_dataset, required=True)
        if record.from_source and record.from_source == record.to_dataset:
            c.flag("from_source", "distinct", "from_source and to_dataset must differ")
        c.reference("ingested_by", "user", record.ingested_by, required=True)
        c.timestamp("ingested_at", record.ingested_at, required=True)
        c.reference("environment", "environment", record.environment)

    elif isinstance(record, ProcessRecord):
        c.blob("code", record.code, ArtifactKind.CODE, required=True)
        c.timestamp("created_at", record.created_at)
        c.timestamp("last_modified_at", record.last_modified_at)
        created = normalize_timestamp(record.created_at)
        modified = normalize_timestamp(record.last_modified_at)
        if created and modified and modified < created:
            c.flag("last_modified_at", "order", "must not precede created_at")
        if c.required("source_datasets", record.source_datasets):
            for i, ref in enumerate(record.source_datasets):
                c.reference(f"source_datasets[{i}]", "dataset", ref, required=True)
        if c.required("target_datasets", record.target_datasets):
            for i, ref in enumerate(record.target_datasets):
                c.reference(f"target_datasets[{i}]", "dataset", ref, required=True)
        overlap = sorted(set(record.source_datasets) & set(record.target_datasets))
        if overlap:
            c.flag(
                "target_datasets",
                "disjoint",
                f"source and target datasets must be disjoint (shared: {', '.join(overlap)})",
            )
        order_seen = set()
        for i, op in enumerate(record.operations):
            c.enum(f"operations[{i}].op_kind", op.op_kind, OP_KINDS, required=True)
            if op.order_index < 0:
                c.flag(f"operations[{i}].order_index", "range", "must be non-negative")
            if op.order_index in order_seen:
                c.flag(
                    f"operations[{i}].order_index",
                    "unique",
                    f"duplicate order_index {op.order_index}",
                )
            order_seen.add(op.order_index)
        c.reference("executed_by", "user", record.executed_by, required=True)

    elif isinstance(record, Study):
        for i, ref in enumerate(record.member_analyses):
            member = c.reference(f"member_analyses[{i}]", "analysis", ref, required=True)
            if member is not None and member.study and member.study != record.study_id:
                c.flag(
                    f"member_analyses[{i}]",
                    "membership",
                    f"analysis {ref!r} already belongs to study {member.study!r}",
                )

    elif isinstance(record, AnalysisRecord):
        c.reference("performed_by", "user", record.performed_by, required=True)
        c.reference("study", "study", record.study)
        c.reference("task", "task", record.task)
        c.blob("model_path", record.model_path, ArtifactKind.MODEL, required=True)
        c.blob("code", record.code, ArtifactKind.CODE, required=True)
        c.reference("environment", "environment", record.environment, required=True)
        if record.algorithm is not None and not record.algorithm.name:
            c.flag("algorithm.name", "required", "must be present and non-empty")
        param_names = set()
        for i, p in enumerate(record.parameters):
            if not p.name:
                c.flag(f"parameters[{i}].name", "required", "must be present and non-empty")
            elif p.name in param_names:
                c.flag(f"parameters[{i}].name", "unique", f"duplicate parameter {p.name!r}")
            param_names.add(p.name)
            c.enum(f"parameters[{i}].value_type", p.value_type, VALUE_TYPES)
        for i, use in enumerate(record.used_datasets):
            c.reference(f"used_datasets[{i}].dataset", "dataset", use.dataset, required=True)
            c.enum(f"used_datasets[{i}].split", use.split, SPLITS)
        for key, value in record.performance.items():
            if not math.isfinite(value):
                c.flag(f"performance.{key}", "finite", "must be a finite number")
        c.timestamp("performed_at", record.performed_at)
        c.reference("previous_version", "analysis", record.previous_version)

    # Environment and TaskRecord carry no invariants beyond alias uniqueness.
    return ValidationReport(c.violations)


__all__ = [
    "ALIAS_FIELDS",
    "Algorithm",
    "AnalysisRecord",
    "AttributeDescriptor",
    "DatasetMetafeatures",
    "DatasetSource",
    "DatasetUse",
    "EmptyResolver",
    "Environment",
    "IngestRecord",
    "ModelLakeDataset",
    "Parameter",
    "ProcessingOperation",
    "ProcessRecord",
    "RECORD_TYPES",
    "Record",
    "Resolver",
    "SchemaAttribute",
    "Study",
    "Tag",
    "TaskRecord",
    "TIMESTAMP_FIELDS",
    "User",
    "ValidationReport",
    "canonical_record_bytes",
    "parse_record",
    "record_alias",
    "record_id",
    "record_payload",
    "record_type_of",
    "validate_record",
]
