"""Search and discovery over registered records, plus the project view.

Ranking is deliberately simple and fully specified so results are
reproducible: the score of a hit is, per query term, the number of
searchable fields (name, description, each tag) containing the term,
summed over terms; ties break by most-recent timestamp (registration
sequence for record types that carry none), then node id ascending.
Matching is case-insensitive substring, no stemming. Indexes are a linear
scan over the in-memory registries, which the record log rebuilds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import NotFoundError, QueryError, StorageError
from .canonical import normalize_timestamp
from .graph import NODE_CLASS_BY_KIND
from .records import (
    AnalysisRecord,
    DatasetSource,
    Environment,
    IngestRecord,
    ModelLakeDataset,
    ProcessRecord,
    Study,
    Tag,
    TaskRecord,
    TIMESTAMP_FIELDS,
    User,
)

if TYPE_CHECKING:
    from .lake import ModelLake

_SNIPPET_LIMIT = 160


@dataclass(frozen=True)
class SearchQuery:
    text: str = ""
    kinds: frozenset[str] = frozenset()
    tags: tuple[str, ...] = ()
    user: str = ""
    date_from: str = ""
    date_to: str = ""
    limit: int = 20

    def ensure_valid(self) -> None:
        if not (self.text or self.kinds or self.tags or self.user or self.date_from or self.date_to):
            raise QueryError("a search needs at least one criterion")
        unknown = sorted(k for k in self.kinds if k not in NODE_CLASS_BY_KIND)
        if unknown:
            raise QueryError(f"unknown node kind(s): {', '.join(unknown)}")
        if self.limit <= 0:
            raise QueryError("limit must be positive")
        if self.date_from and self.date_to and self.date_from > self.date_to:
            raise QueryError("date range is inverted")

    @classmethod
    def from_params(cls, params: dict[str, list[str]]) -> "SearchQuery":
        def single(key: str) -> str:
            values = params.get(key, [])
            return values[-1] if values else ""

        kinds = []
        for chunk in params.get("kind", []):
            kinds.extend(k for k in chunk.split(",") if k)
        tags = []
        for chunk in params.get("tag", []):
            tags.extend(t for t in chunk.split(",") if t)
        limit_raw = single("limit")
        try:
            limit = int(limit_raw) if limit_raw else 20
        except ValueError:
            raise QueryError(f"limit must be an integer, got {limit_raw!r}") from None
        return cls(
            text=single("text"),
            kinds=frozenset(kinds),
            tags=tuple(tags),
            user=single("user"),
            date_from=single("from"),
            date_to=single("to"),
            limit=limit,
        )


def _search_fields(lake: "ModelLake", node_id: str) -> tuple[str, str, tuple[str, ...], str, str]:
    """(name, description, tags, timestamp, attributed user) for one node."""
    record = lake.record_for_node(node_id)
    if record is None:
        # blob-backed node (model or code): searchable by id and kind only
        try:
            stored_at = lake.store.blob_meta(node_id).stored_at
        except (NotFoundError, StorageError):
            stored_at = ""
        return node_id, "", (), stored_at, ""
    rtype = lake.type_for_node(node_id) or ""
    ts_field = TIMESTAMP_FIELDS.get(rtype, "")
    ts = getattr(record, ts_field, "") if ts_field else ""
    if isinstance(record, User):
        return record.name, "", (), ts, ""
    if isinstance(record, DatasetSource):
        return record.name, record.description, (), ts, record.owner
    if isinstance(record, ModelLakeDataset):
        return record.name, record.description, tuple(record.tags), ts, ""
    if isinstance(record, Environment):
        return record.name, "", (), ts, ""
    if isinstance(record, Study):
        return "", record.description, (), ts, ""
    if isinstance(record, TaskRecord):
        return "", record.description, (), ts, ""
    if isinstance(record, IngestRecord):
        return "", record.comments, (), ts, record.ingested_by
    if isinstance(record, ProcessRecord):
        return record.name, record.description, (), ts, record.executed_by
    if isinstance(record, AnalysisRecord):
        return "", record.description, (), ts, record.performed_by
    return "", "", (), ts, ""


def _snippet(description: str) -> str:
    if len(description) <= _SNIPPET_LIMIT:
        return description
    return description[: _SNIPPET_LIMIT - 3] + "..."


def search(lake: "ModelLake", query: SearchQuery) -> list[dict]:
    query.ensure_valid()
    terms = [t.casefold() for t in query.text.split()] if query.text else []
    wanted_tags = {Tag(t).folded() for t in query.tags}
    # normalized bounds compare lexicographically against stored timestamps;
    # prefixes like "2024-05-01" pass through and still compare correctly
    date_from = normalize_timestamp(query.date_from) or query.date_from
    date_to = normalize_timestamp(query.date_to) or query.date_to

    results = []
    for node_id in lake.graph.node_ids():
        node = lake.graph.node(node_id)
        if query.kinds and node.node_kind not in query.kinds:
            continue
        name, description, tags, ts, attributed = _search_fields(lake, node_id)
        folded_tags = {Tag(t).folded() for t in tags}
        folded_fields = [name.casefold(), description.casefold()] + sorted(folded_tags)
        if wanted_tags and not wanted_tags <= folded_tags:
            continue
        if query.user and attributed != query.user:
            continue
        if date_from and (not ts or ts < date_from):
            continue
        if date_to and (not ts or ts > date_to):
            continue
        score = 0
        if terms:
            hits_per_term = [sum(1 for f in folded_fields if term in f) for term in terms]
            if any(h == 0 for h in hits_per_term):
                continue
            score = sum(hits_per_term)
        results.append(
            {
                "node_id": node_id,
                "node_kind": node.node_kind,
                "name": name,
                "snippet": _snippet(description),
                "score": score,
                "_ts": ts,
                "_seq": lake.seq_for_node(node_id),
            }
        )

    # chained stable sorts: score desc, then recency desc, then node_id asc;
    # registration sequence stands in for recency only when a record type
    # carries no timestamp, so equal explicit timestamps fall to node_id.
    results.sort(key=lambda e: e["node_id"])
    results.sort(key=lambda e: (e["_ts"], e["_seq"] if not e["_ts"] else 0), reverse=True)
    results.sort(key=lambda e: e["score"], reverse=True)
    trimmed = results[: query.limit]
    for entry in trimmed:
        del entry["_ts"], entry["_seq"]
    return trimmed


def project_view(lake: "ModelLake", study_ref: str) -> dict:
    """Assemble the three-section project answer for one study."""
    try:
        study_node = lake.resolve_node(study_ref)
    except NotFoundError:
        raise NotFoundError(f"no such study: {study_ref}") from None
    if lake.type_for_node(study_node) != "study":
        raise NotFoundError(f"not a study: {study_ref}")
    study = lake.record_for_node(study_node)

    member_ids = sorted(
        {e.from_id for e in lake.graph.in_edges(study_node) if e.kind == "member_of_study"}
    )
    analyses = [(nid, lake.record_for_node(nid)) for nid in member_ids]
    analyses.sort(key=lambda item: (item[1].performed_at, item[0]))

    # Dataset section: union of used datasets, one entry per version family,
    # the newest used version carrying the family's chain length.
    seen_datasets: dict[str, str] = {}  # dataset alias -> node id
    for _, record in analyses:
        for use in record.used_datasets:
            if use.dataset not in seen_datasets:
                seen_datasets[use.dataset] = lake.resolve_reference("dataset", use.dataset)
    by_family: dict[str, str] = {}
    for node_id in seen_datasets.values():
        chain = lake.graph.version_chain(node_id)
        root = chain[0]
        current = by_family.get(root)
        if current is None or chain.index(node_id) > chain.index(current):
            by_family[root] = node_id
    dataset_section = []
    for node_id in by_family.values():
        record = lake.record_for_node(node_id)
        dataset_section.append(
            {
                "node_id": node_id,
                "dataset": lake.payload_for_node(node_id),
                "version_count": len(lake.graph.version_chain(node_id)),
            }
        )
    dataset_section.sort(key=lambda e: e["dataset"].get("dataset_id", ""))

    model_section = []
    bundle_nodes: dict[str, dict] = {}
    bundle_edges: dict[tuple, dict] = {}
    for node_id, record in analyses:
        payload = lake.payload_for_node(node_id) or {}
        model_section.append(
            {
                "node_id": node_id,
                "analysis": {
                    key: payload[key]
                    for key in (
                        "analysis_id",
                        "description",
                        "analysis_type",
                        "performed_by",
                        "performed_at",
                    )
                    if key in payload
                },
                "algorithm": payload.get("algorithm"),
                "parameters": payload.get("parameters", []),
                "performance": payload.get("performance", {}),
                "model": record.model_path,
            }
        )
        bundle = lake.graph.bundle(record.model_path)
        for node in bundle.nodes:
            bundle_nodes[node.node_id] = node.to_doc()
        for edge in bundle.edges:
            bundle_edges[edge.sort_key()] = edge.to_doc()

    return {
        "node_id": study_node,
        "study": lake.payload_for_node(study_node),
        "dataset_section": dataset_section,
        "model_section": model_section,
        "lineage_section": {
            "nodes": [bundle_nodes[k] for k in sorted(bundle_nodes)],
            "edges": [bundle_edges[k] for k in sorted(bundle_edges)],
        },
    }
