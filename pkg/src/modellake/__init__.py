"""modellake: a self-contained model lake.

Content-addressed artifact storage, 5W1H metadata records with canonical
serialization, an append-only versioned lineage graph, governance audits,
catalog search, an HTTP service and the ``mlk`` CLI.
"""

from .canonical import canonical_json_bytes, normalize_timestamp, record_id_for
from .cas import ArtifactKind, BlobId, BlobMeta, CasStore
from .catalog import SearchQuery
from .completeness import CompletenessScore, completeness_5w1h
from .errors import (
    ConfigError,
    ConflictError,
    CorruptBlobError,
    ModelLakeError,
    NotFoundError,
    QueryError,
    SerializationError,
    StorageError,
    ValidationFailed,
    Violation,
)
from .governance import ComplianceReport, LakeHealth, ReproManifest
from .graph import LineageBundle, LineageEdge, LineageGraph, LineageNode, VersionDiff, diff_versions
from .lake import ModelLake, init_data_dir
from .records import (
    Algorithm,
    AnalysisRecord,
    AttributeDescriptor,
    DatasetMetafeatures,
    DatasetSource,
    DatasetUse,
    Environment,
    IngestRecord,
    ModelLakeDataset,
    Parameter,
    ProcessingOperation,
    ProcessRecord,
    SchemaAttribute,
    Study,
    Tag,
    TaskRecord,
    User,
    ValidationReport,
    canonical_record_bytes,
    parse_record,
    record_id,
    record_payload,
    validate_record,
)
from .server import ApiError, LakeService

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "AnalysisRecord",
    "ApiError",
    "ArtifactKind",
    "AttributeDescriptor",
    "BlobId",
    "BlobMeta",
    "CasStore",
    "ComplianceReport",
    "CompletenessScore",
    "ConfigError",
    "ConflictError",
    "CorruptBlobError",
    "DatasetMetafeatures",
    "DatasetSource",
    "DatasetUse",
    "Environment",
    "IngestRecord",
    "LakeHealth",
    "LakeService",
    "LineageBundle",
    "LineageEdge",
    "LineageGraph",
    "LineageNode",
    "ModelLake",
    "ModelLakeDataset",
    "ModelLakeError",
    "NotFoundError",
    "Parameter",
    "ProcessRecord",
    "ProcessingOperation",
    "QueryError",
    "ReproManifest",
    "SchemaAttribute",
    "SearchQuery",
    "SerializationError",
    "StorageError",
    "Study",
    "Tag",
    "TaskRecord",
    "User",
    "ValidationFailed",
    "ValidationReport",
    "VersionDiff",
    "Violation",
    "canonical_json_bytes",
    "canonical_record_bytes",
    "completeness_5w1h",
    "diff_versions",
    "init_data_dir",
    "normalize_timestamp",
    "parse_record",
    "record_id",
    "record_id_for",
    "record_payload",
    "validate_record",
]
