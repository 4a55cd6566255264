from __future__ import annotations

from fractions import Fraction

import pytest

from modellake import ConflictError, NotFoundError

from fixtures import ALGORITHM, build_diabetes_lake, diabetes_model_bytes
from stub_trainer import train_from_manifest, train_model


def test_compliant_when_all_sources_approved(lake):
    ids = build_diabetes_lake(lake)
    doc = lake.compliance_doc(ids["blobs"]["model"], ["src-clinic"])
    assert doc["verdict"] == "compliant"
    assert doc["offending_sources"] == []
    assert doc["undocumented_paths"] == []


def test_unapproved_source_listed_exactly(lake):
    ids = build_diabetes_lake(lake)
    doc = lake.compliance_doc(ids["blobs"]["model"], ["some-other-source"])
    assert doc["verdict"] == "non_compliant"
    assert doc["offending_sources"] == ["src-clinic"]


def test_dataset_without_ingest_lineage_is_undetermined(lake):
    ids = build_diabetes_lake(lake)
    orphan_blob = str(lake.put_blob(b"who knows where this came from", "dataset"))
    lake.register_payload("dataset", {"dataset_id": "ds-orphan", "location": orphan_blob})
    model2 = str(lake.put_blob(b"model on orphan", "model"))
    lake.register_payload(
        "analysis",
        {
            "analysis_id": "ana-orphan",
            "performed_by": "u-lin",
            "model_path": model2,
            "code": ids["blobs"]["train_code"],
            "environment": "env-py311",
            "used_datasets": [{"dataset": "ds-orphan", "split": "train"}],
        },
    )
    doc = lake.compliance_doc(model2, ["src-clinic"])
    assert doc["verdict"] == "undetermined"
    assert doc["undocumented_paths"] == [lake.resolve_node("ds-orphan")]
    assert doc["offending_sources"] == []


def test_verdict_monotone_in_approved_set(lake):
    ids = build_diabetes_lake(lake)
    small = lake.compliance_doc(ids["blobs"]["model"], [])
    large = lake.compliance_doc(ids["blobs"]["model"], ["src-clinic", "src-extra"])
    rank = {"non_compliant": 0, "undetermined": 1, "compliant": 2}
    assert rank[large["verdict"]] >= rank[small["verdict"]]
    assert set(large["offending_sources"]) <= set(small["offending_sources"])


def test_compliance_unknown_model_not_found(lake):
    with pytest.raises(NotFoundError):
        lake.compliance_doc("sha256:" + "9" * 64, [])


def test_repro_manifest_complete_for_fixture(lake):
    ids = build_diabetes_lake(lake)
    doc = lake.repro_doc("ana-0001")
    assert doc["missing"] == []
    assert doc["complete"] is True
    assert doc["code"] == ids["blobs"]["train_code"]
    assert [d["split"] for d in doc["datasets"]] == ["train", "test"]
    assert doc["environment"]["env_id"] == "env-py311"
    assert doc["algorithm"] == ALGORITHM
    assert all(lake.has_blob(d["blob"]) for d in doc["datasets"])


def test_repro_missing_code_blob_reported_not_raised(tmp_path, lake):
    ids = build_diabetes_lake(lake)
    # remove the stored code payload and sidecar out from under the record
    from modellake.cas import BlobId

    blob = BlobId.parse(ids["blobs"]["train_code"])
    payload = lake.store.root / blob.digest[:2] / blob.digest[2:4] / blob.digest[4:]
    payload.unlink()
    payload.with_name(payload.name + ".meta.json").unlink()
    doc = lake.repro_doc("ana-0001")
    assert "code" in doc["missing"]
    assert doc["complete"] is False


def test_stub_trainer_reproduces_registered_model(lake):
    ids = build_diabetes_lake(lake)
    manifest = lake.repro_doc("ana-0001")
    rebuilt = train_from_manifest(manifest, lake.get_blob)
    from modellake.cas import BlobId

    assert str(BlobId.for_payload(rebuilt)) == ids["blobs"]["model"]
    assert rebuilt == diabetes_model_bytes()


def test_bias_surface_two_sources(lake):
    ids = build_diabetes_lake(lake)
    second_src = {
        "source_id": "src-lab",
        "name": "lab results feed",
        "description": "Bloodwork lab measurements",
        "owner": "u-amel",
        "location": "https://lab.example.org/feed",
    }
    lake.register_payload("source", second_src)
    lab_blob = str(lake.put_blob(b"lab rows", "dataset"))
    lake.register_payload("dataset", {"dataset_id": "ds-lab", "location": lab_blob, "name": "lab"})
    lake.register_payload(
        "ingest",
        {
            "ingest_id": "ing-lab",
            "from_source": "src-lab",
            "to_dataset": "ds-lab",
            "ingested_by": "u-amel",
            "ingested_at": "2024-05-02T12:00:00Z",
        },
    )
    model2 = str(lake.put_blob(b"two-source model", "model"))
    lake.register_payload(
        "analysis",
        {
            "analysis_id": "ana-two",
            "performed_by": "u-lin",
            "model_path": model2,
            "code": ids["blobs"]["train_code"],
            "environment": "env-py311",
            "used_datasets": [
                {"dataset": "ds-intake-clean", "split": "train"},
                {"dataset": "ds-lab", "split": "train"},
            ],
        },
    )
    entries = lake.bias_doc(model2)
    assert [e["source"] for e in entries] == ["src-clinic", "src-lab"]
    assert entries[0]["owner"] == "u-amel"
    assert entries[1]["description"] == "Bloodwork lab measurements"
    closure = lake.graph.upstream(model2)
    for entry in entries:
        assert set(entry["datasets"]) <= closure


def test_bias_surface_empty_without_source_lineage(lake):
    ids = build_diabetes_lake(lake)
    blob = str(lake.put_blob(b"sourceless", "dataset"))
    lake.register_payload("dataset", {"dataset_id": "ds-bare", "location": blob})
    model2 = str(lake.put_blob(b"bare model", "model"))
    lake.register_payload(
        "analysis",
        {
            "analysis_id": "ana-bare",
            "performed_by": "u-lin",
            "model_path": model2,
            "code": ids["blobs"]["train_code"],
            "environment": "env-py311",
            "used_datasets": [{"dataset": "ds-bare", "split": "train"}],
        },
    )
    assert lake.bias_doc(model2) == []
    assert lake.compliance_doc(model2, [])["verdict"] == "undetermined"


def _register_version_chain(lake, ids, accuracies):
    prev = None
    aliases = []
    for i, acc in enumerate(accuracies, start=1):
        model_bytes = train_model(
            [], b"evolution", {}, {"name": "gb"}, [{"name": "round", "value": str(i), "value_type": "int"}]
        )
        model_ref = str(lake.put_blob(model_bytes + str(i).encode(), "model"))
        payload = {
            "analysis_id": f"ana-evo-{i}",
            "description": f"evolution round {i}",
            "performed_by": "u-lin",
            "model_path": model_ref,
            "code": ids["blobs"]["train_code"],
            "environment": "env-py311",
            "performance": {"accuracy": acc},
            "performed_at": f"2024-06-0{i}T10:00:00Z",
        }
        if prev:
            payload["previous_version"] = prev
        lake.register_payload("analysis", payload)
        prev = f"ana-evo-{i}"
        aliases.append(prev)
    return aliases


def test_evolution_report_three_versions(lake):
    ids = build_diabetes_lake(lake)
    aliases = _register_version_chain(lake, ids, [0.80, 0.85, 0.87])
    entries = lake.evolution_doc(aliases[0])  # query from any member
    assert [e["performance"]["accuracy"] for e in entries] == [0.80, 0.85, 0.87]
    assert entries[0]["diff"] is None
    for entry in entries[1:]:
        changed = {c["field"] for c in entry["diff"]["changed_fields"]}
        assert "performance" in changed
    chain = lake.versions_doc(aliases[-1])["chain"]
    assert len(entries) == len(chain)


def test_evolution_single_version(lake):
    build_diabetes_lake(lake)
    entries = lake.evolution_doc("ana-0001")
    assert len(entries) == 1
    assert entries[0]["diff"] is None


def test_evolution_requires_analysis_node(lake):
    ids = build_diabetes_lake(lake)
    with pytest.raises(ConflictError):
        lake.evolution_doc(ids["blobs"]["model"])


def test_empty_lake_is_healthy(lake):
    doc = lake.lake_health_doc()
    assert doc == {
        "total_models": 0,
        "documented_models": 0,
        "documentation_rate": 0.0,
        "mean_completeness": 0.0,
        "swamp_flag": False,
    }


def test_fully_documented_lake_not_a_swamp(lake):
    build_diabetes_lake(lake)
    doc = lake.lake_health_doc()
    assert doc["total_models"] == 1
    assert doc["documented_models"] == 1
    assert doc["documentation_rate"] == 1.0
    assert doc["swamp_flag"] is False


def test_health_threshold_configurable(lake):
    build_diabetes_lake(lake)
    assert lake.lake_health_doc(threshold=1.1)["swamp_flag"] is True  # rate 1.0 < 1.1


def test_documentation_rate_matches_brute_force_recount(lake):
    ids = build_diabetes_lake(lake)
    _register_version_chain(lake, ids, [0.7, 0.8])  # undocumented: no study/task
    doc = lake.lake_health_doc()
    documented = 0
    total = 0
    for node_id in lake.graph.node_ids():
        if lake.graph.node(node_id).node_kind != "model":
            continue
        total += 1
        producer = lake.graph.producer_of(node_id)
        record = lake.record_for_node(producer)
        if lake.completeness_for(record).score == 1.0:
            documented += 1
    assert doc["total_models"] == total == 3
    assert doc["documented_models"] == documented == 1
    assert Fraction(doc["documented_models"], doc["total_models"]) == Fraction(1, 3)
    assert doc["swamp_flag"] is True


def test_governance_operations_are_read_only(lake):
    ids = build_diabetes_lake(lake)
    nodes, edges, records = lake.graph.node_count, lake.graph.edge_count, lake.record_count
    lake.compliance_doc(ids["blobs"]["model"], ["src-clinic"])
    lake.repro_doc("ana-0001")
    lake.bias_doc(ids["blobs"]["model"])
    lake.evolution_doc("ana-0001")
    lake.lake_health_doc()
    assert (lake.graph.node_count, lake.graph.edge_count, lake.record_count) == (
        nodes,
        edges,
        records,
    )
