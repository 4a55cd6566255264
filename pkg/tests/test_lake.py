from __future__ import annotations

import pytest

from modellake import ConfigError, ModelLake, init_data_dir
from modellake.log import RecordLog

from fixtures import build_diabetes_lake


def test_init_refuses_non_empty_foreign_directory(tmp_path):
    target = tmp_path / "busy"
    target.mkdir()
    (target / "something.txt").write_text("not a lake")
    with pytest.raises(ConfigError):
        init_data_dir(target)


def test_open_requires_initialized_directory(tmp_path):
    with pytest.raises(ConfigError):
        ModelLake(tmp_path / "nowhere")


def test_exclusive_directory_lock(lake_dir):
    first = ModelLake(lake_dir)
    try:
        with pytest.raises(ConfigError):
            ModelLake(lake_dir)
    finally:
        first.close()
    second = ModelLake(lake_dir)  # released lock can be retaken
    second.close()


def test_restart_rebuilds_identical_state(lake_dir):
    with ModelLake(lake_dir) as lake:
        ids = build_diabetes_lake(lake)
        lineage_before = lake.lineage_doc(ids["blobs"]["model"])
        health_before = lake.lake_health_doc()
        count_before = (lake.record_count, lake.graph.node_count, lake.graph.edge_count)
    with ModelLake(lake_dir) as lake:
        assert (lake.record_count, lake.graph.node_count, lake.graph.edge_count) == count_before
        assert lake.lineage_doc(ids["blobs"]["model"]) == lineage_before
        assert lake.lake_health_doc() == health_before


def test_torn_log_tail_is_dropped_and_truncated(lake_dir):
    with ModelLake(lake_dir) as lake:
        lake.register_payload("user", {"user_id": "u1", "name": "A", "role": "other"})
        lake.register_payload("user", {"user_id": "u2", "name": "B", "role": "other"})
    log_path = lake_dir / "records.log"
    intact = log_path.read_bytes()
    log_path.write_bytes(intact + b'{"record": {"user_id": "u3"}, "record_t')
    with ModelLake(lake_dir) as lake:
        assert lake.record_count == 2
    assert log_path.read_bytes() == intact


def test_corrupt_committed_log_line_is_an_error(lake_dir):
    log_path = lake_dir / "records.log"
    log_path.write_bytes(b"this is not json\n")
    from modellake.errors import StorageError

    with pytest.raises(StorageError):
        ModelLake(lake_dir)


def test_log_appends_canonical_envelopes(tmp_path):
    log = RecordLog(tmp_path / "records.log")
    log.append("user", {"user_id": "u1", "role": "other"})
    raw = (tmp_path / "records.log").read_bytes()
    assert raw == b'{"record":{"role":"other","user_id":"u1"},"record_type":"user"}\n'
    assert log.replay() == [("user", {"user_id": "u1", "role": "other"})]


def test_node_ids_stable_across_restart(lake_dir):
    with ModelLake(lake_dir) as lake:
        node_id, _ = lake.register_payload(
            "user", {"user_id": "stable", "name": "Same", "role": "other"}
        )
    with ModelLake(lake_dir) as lake:
        again, created = lake.register_payload(
            "user", {"user_id": "stable", "name": "Same", "role": "other"}
        )
    assert again == node_id and not created


def test_resolve_node_accepts_alias_and_record_id(lake):
    ids = build_diabetes_lake(lake)
    node = ids["nodes"]["ana-0001"]
    assert lake.resolve_node("ana-0001") == node
    assert lake.resolve_node(node) == node


def test_ambiguous_alias_is_a_conflict(lake):
    from modellake.errors import ConflictError

    blob = str(lake.put_blob(b"payload", "dataset"))
    lake.register_payload("user", {"user_id": "twin", "name": "U", "role": "other"})
    lake.register_payload("dataset", {"dataset_id": "twin", "location": blob})
    with pytest.raises(ConflictError):
        lake.resolve_node("twin")
