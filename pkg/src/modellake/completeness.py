"""5W1H completeness scoring over ingest, process and analysis records.

The six dimensions map to fixed field sets per record family; a dimension
is satisfied only when every listed field is present and non-empty. The
score is the satisfied-dimension count over 6, so it is monotone: filling
a previously missing field can only flip dimensions from False to True.

Ingest is the one family whose mapping reaches through references
(from_source.description, to_dataset.name, to_dataset.location), so it
takes a resolver; an unresolvable reference leaves its dimension False.
"""

from __future__ import annotations

from dataclasses import dataclass

from .records import (
    AnalysisRecord,
    EmptyResolver,
    IngestRecord,
    ProcessRecord,
    Resolver,
)

DIMENSIONS = ("what", "who", "where", "when", "why", "how")


@dataclass(frozen=True)
class CompletenessScore:
    per_dimension: dict[str, bool]
    score: float

    def to_doc(self) -> dict:
        return {
            "per_dimension": {d: self.per_dimension[d] for d in DIMENSIONS},
            "score": self.score,
        }


def _score(per_dimension: dict[str, bool]) -> CompletenessScore:
    satisfied = sum(1 for d in DIMENSIONS if per_dimension[d])
    return CompletenessScore(per_dimension=per_dimension, score=satisfied / 6)


def _ingest_dimensions(record: IngestRecord, resolver: Resolver) -> dict[str, bool]:
    source = resolver.lookup_record("source", record.from_source) if record.from_source else None
    dataset = resolver.lookup_record("dataset", record.to_dataset) if record.to_dataset else None
    return {
        "what": bool(source and source.description and dataset and dataset.name),
        "who": bool(record.ingested_by),
        "where": bool(record.access_url and dataset and dataset.location),
        "when": bool(record.ingested_at),
        "why": bool(record.comments),
        "how": bool(record.mode and record.environment),
    }


def _process_dimensions(record: ProcessRecord) -> dict[str, bool]:
    return {
        "what": bool(record.name and record.source_datasets and record.target_datasets),
        "who": bool(record.executed_by),
        "where": bool(record.code),
        "when": bool(record.created_at),
        "why": bool(record.description),
        "how": bool(record.operations and record.language_program),
    }


def _analysis_dimensions(record: AnalysisRecord) -> dict[str, bool]:
    return {
        "what": bool(record.description and record.used_datasets),
        "who": bool(record.performed_by),
        "where": bool(record.model_path),
        "when": bool(record.performed_at),
        "why": bool(record.study or record.task),
        "how": bool(
            record.algorithm
            and record.algorithm.name
            and record.parameters
            and record.environment
        ),
    }


def completeness_5w1h(
    record: IngestRecord | ProcessRecord | AnalysisRecord,
    resolver: Resolver | None = None,
) -> CompletenessScore:
    if isinstance(record, IngestRecord):
        dims = _ingest_dimensions(record, resolver or EmptyResolver())
    elif isinstance(record, ProcessRecord):
        dims = _process_dimensions(record)
    elif isinstance(record, AnalysisRecord):
        dims = _analysis_dimensions(record)
    else:
        raise TypeError(f"no 5W1H mapping for {type(record).__name__}")
    return _score(dims)
