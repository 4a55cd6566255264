"""Governance operations: compliance, reproducibility, bias, evolution, health.

All of these are read-only walks over the lineage graph and the record
registries; none of them mutates nodes, edges or blobs. Verdicts follow
the recorded provenance only: a dataset with no source ancestry is
"undocumented", never silently approved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import ConflictError
from .graph import diff_versions

if TYPE_CHECKING:
    from .lake import ModelLake


@dataclass(frozen=True)
class ComplianceReport:
    model: str
    approved_sources: tuple[str, ...]
    verdict: str  # compliant | non_compliant | undetermined
    offending_sources: tuple[str, ...]
    undocumented_paths: tuple[str, ...]

    def to_doc(self) -> dict:
        return {
            "model": self.model,
            "approved_sources": list(self.approved_sources),
            "verdict": self.verdict,
            "offending_sources": list(self.offending_sources),
            "undocumented_paths": list(self.undocumented_paths),
        }


@dataclass(frozen=True)
class ReproManifest:
    analysis: str
    datasets: tuple[dict, ...]  # {"blob": BlobId str, "split": ...}
    code: str
    environment: dict | None
    algorithm: dict | None
    parameters: tuple[dict, ...]
    missing: tuple[str, ...]

    @property
    def complete(self) -> bool:
        return not self.missing

    def to_doc(self) -> dict:
        return {
            "analysis": self.analysis,
            "datasets": list(self.datasets),
            "code": self.code,
            "environment": self.environment,
            "algorithm": self.algorithm,
            "parameters": list(self.parameters),
            "missing": list(self.missing),
            "complete": self.complete,
        }


@dataclass(frozen=True)
class LakeHealth:
    total_models: int
    documented_models: int
    documentation_rate: float
    mean_completeness: float
    swamp_flag: bool

    def to_doc(self) -> dict:
        return {
            "total_models": self.total_models,
            "documented_models": self.documented_models,
            "documentation_rate": self.documentation_rate,
            "mean_completeness": self.mean_completeness,
            "swamp_flag": self.swamp_flag,
        }


def _require_model(lake: "ModelLake", model_ref: str) -> str:
    node_id = lake.resolve_node(model_ref)
    node = lake.graph.node(node_id)
    if node.node_kind != "model":
        raise ConflictError(f"{model_ref} is a {node.node_kind} node, not a model")
    return node_id


def _require_analysis(lake: "ModelLake", analysis_ref: str) -> str:
    node_id = lake.resolve_node(analysis_ref)
    node = lake.graph.node(node_id)
    if node.node_kind != "analysis":
        raise ConflictError(f"{analysis_ref} is a {node.node_kind} node, not an analysis")
    return node_id


def audit_compliance(lake: "ModelLake", model_ref: str, approved_sources) -> ComplianceReport:
    """Classify every DatasetSource ancestor of the model against an allow set."""
    model_node = _require_model(lake, model_ref)
    approved = {str(s) for s in approved_sources}
    closure = lake.graph.upstream(model_node)

    offending = []
    for node_id in closure:
        if lake.graph.node(node_id).node_kind != "source":
            continue
        record = lake.record_for_node(node_id)
        source_id = record.source_id if record is not None else node_id
        if source_id not in approved and node_id not in approved:
            offending.append(source_id)

    undocumented = []
    for node_id in closure:
        if lake.graph.node(node_id).node_kind != "dataset":
            continue
        ancestors = lake.graph.upstream(node_id)
        if not any(lake.graph.node(a).node_kind == "source" for a in ancestors):
            undocumented.append(node_id)

    if offending:
        verdict = "non_compliant"
    elif undocumented:
        verdict = "undetermined"
    else:
        verdict = "compliant"
    return ComplianceReport(
        model=model_node,
        approved_sources=tuple(sorted(approved)),
        verdict=verdict,
        offending_sources=tuple(sorted(offending)),
        undocumented_paths=tuple(sorted(undocumented)),
    )


def reproducibility_closure(lake: "ModelLake", analysis_ref: str) -> ReproManifest:
    """Everything needed to re-run an analysis, with absences reported."""
    analysis_node = _require_analysis(lake, analysis_ref)
    record = lake.record_for_node(analysis_node)
    missing: list[str] = []

    datasets: list[dict] = []
    if not record.used_datasets:
        missing.append("datasets")
    for use in record.used_datasets:
        dataset = lake.lookup_record("dataset", use.dataset)
        if dataset is None:
            missing.append(f"dataset:{use.dataset}")
            continue
        if not dataset.location or not lake.has_blob(dataset.location):
            missing.append(f"blob:{dataset.location or use.dataset}")
            continue
        datasets.append({"blob": dataset.location, "split": use.split})

    if not record.code or not lake.has_blob(record.code):
        missing.append("code")
    environment = None
    if record.environment:
        env = lake.lookup_record("environment", record.environment)
        if env is None:
            missing.append("environment")
        else:
            environment = lake.payload_for_node(
                lake.resolve_reference("environment", record.environment)
            )
    else:
        missing.append("environment")

    algorithm = None
    if record.algorithm is None or not record.algorithm.name:
        missing.append("algorithm")
    else:
        algorithm = {"name": record.algorithm.name}
        if record.algorithm.family:
            algorithm["family"] = record.algorithm.family

    parameters = tuple(
        {"name": p.name, "value": p.value, "value_type": p.value_type}
        for p in record.parameters
    )
    return ReproManifest(
        analysis=analysis_node,
        datasets=tuple(datasets),
        code=record.code,
        environment=environment,
        algorithm=algorithm,
        parameters=parameters,
        missing=tuple(missing),
    )


def bias_surface(lake: "ModelLake", model_ref: str) -> list[dict]:
    """Every source feeding the model, with owner and affected datasets."""
    model_node = _require_model(lake, model_ref)
    closure = lake.graph.upstream(model_node)
    dataset_nodes = [n for n in closure if lake.graph.node(n).node_kind == "dataset"]

    entries = []
    for node_id in closure:
        if lake.graph.node(node_id).node_kind != "source":
            continue
        record = lake.record_for_node(node_id)
        affected = sorted(
            d for d in dataset_nodes if node_id in lake.graph.upstream(d)
        )
        entries.append(
            {
                "source": record.source_id if record is not None else node_id,
                "owner": record.owner if record is not None else "",
                "description": record.description if record is not None else "",
                "datasets": affected,
            }
        )
    entries.sort(key=lambda e: e["source"])
    return entries


def evolution_report(lake: "ModelLake", head_ref: str) -> list[dict]:
    """Version chain of an analysis family with per-step diffs and metrics."""
    head = _require_analysis(lake, head_ref)
    chain = lake.graph.version_chain(head)
    entries = []
    for i, node_id in enumerate(chain):
        record = lake.record_for_node(node_id)
        entry = {
            "version": node_id,
            "performed_at": record.performed_at if record is not None else "",
            "performance": dict(record.performance) if record is not None else {},
            "diff": None,
        }
        if i > 0:
            step = diff_versions(lake.graph, chain[i - 1], node_id, lake.payload_for_node)
            entry["diff"] = {
                "changed_fields": list(step.changed_fields),
                "changed_upstream": list(step.changed_upstream),
            }
        entries.append(entry)
    return entries


def lake_health(lake: "ModelLake", threshold: float) -> LakeHealth:
    """Documentation rate over all models; "documented" means 5W1H score 1.0."""
    model_nodes = [n for n in lake.graph.node_ids() if lake.graph.node(n).node_kind == "model"]
    total = len(model_nodes)
    documented = 0
    score_sum = 0.0
    for node_id in model_nodes:
        producer = lake.graph.producer_of(node_id)
        record = lake.record_for_node(producer) if producer else None
        if record is None:
            continue
        score = lake.completeness_for(record).score
        score_sum += score
        if score == 1.0:
            documented += 1
    rate = documented / total if total else 0.0
    mean = score_sum / total if total else 0.0
    return LakeHealth(
        total_models=total,
        documented_models=documented,
        documentation_rate=rate,
        mean_completeness=mean,
        swamp_flag=bool(total) and rate < threshold,
    )
