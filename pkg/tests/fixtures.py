"""Shared scenario builders: the diabetes project fixture and random graphs."""

from __future__ import annotations

import random

from modellake import ModelLake
from modellake.graph import LineageGraph

from stub_trainer import train_model

RAW_CSV = b"age,bmi,glucose\n63,31.2,148\n45,27.9,110\n"
CLEAN_CSV = b"age,bmi,glucose\n63,31.2,148\n45,27.9,110\n# normalized\n"
CLEAN_CODE = b"def clean(rows):\n    return [r for r in rows if all(r)]\n"
TRAIN_CODE = b"def fit(frame, target):\n    return 'boosted-trees'\n"

ENVIRONMENT = {
    "env_id": "env-py311",
    "name": "python-3.11 training image",
    "runtime_descriptors": {"python": "3.11.8", "scikit-learn": "1.4.2"},
    "hardware": "x86_64, 16 GiB",
}
ALGORITHM = {"name": "GradientBoosting", "family": "ensemble"}
PARAMETERS = [
    {"name": "learning_rate", "value": "0.1", "value_type": "float"},
    {"name": "max_depth", "value": "3", "value_type": "int"},
]


def diabetes_records(blob_ids: dict) -> list[tuple[str, dict]]:
    """Registration-ordered (record_type, payload) pairs for the fixture."""
    return [
        ("user", {"user_id": "u-amel", "name": "Amel Diallo", "role": "data_engineer"}),
        ("user", {"user_id": "u-lin", "name": "Lin Osei", "role": "data_scientist"}),
        (
            "source",
            {
                "source_id": "src-clinic",
                "name": "Toulouse clinic registry",
                "source_type": "csv-file",
                "description": "Anonymized clinical export of patient intake records",
                "owner": "u-amel",
                "location": "https://clinic.example.org/exports/intake.csv",
                "created_at": "2024-04-02T08:00:00Z",
            },
        ),
        ("environment", ENVIRONMENT),
        (
            "dataset",
            {
                "dataset_id": "ds-intake-raw",
                "name": "clinic-intake-raw",
                "format": "csv",
                "description": "Raw clinic intake export",
                "tags": ["clinical", "intake"],
                "attributes": [
                    {"name": "age", "declared_type": "int"},
                    {"name": "bmi", "declared_type": "float"},
                    {"name": "glucose", "declared_type": "int"},
                ],
                "location": blob_ids["raw"],
                "created_at": "2024-05-01T11:55:00Z",
                "metafeatures": {
                    "n_rows": 2,
                    "n_attributes": 3,
                    "per_attribute_descriptors": [
                        {"attribute_name": "age", "declared_type": "int", "missing_fraction": 0.0},
                        {"attribute_name": "bmi", "declared_type": "float", "missing_fraction": 0.0},
                    ],
                    "extra": {"class_balance": 0.5},
                },
                "source": "src-clinic",
            },
        ),
        (
            "ingest",
            {
                "ingest_id": "ing-0001",
                "mode": "batch",
                "comments": "Initial load of the clinic export",
                "from_source": "src-clinic",
                "to_dataset": "ds-intake-raw",
                "ingested_by": "u-amel",
                "access_url": "https://lake.example.org/raw/intake.csv",
                "ingested_at": "2024-05-01T12:00:00Z",
                "environment": "env-py311",
            },
        ),
        (
            "dataset",
            {
                "dataset_id": "ds-intake-clean",
                "name": "clinic-intake-clean",
                "format": "csv",
                "description": "Cleaned intake cohort with normalized units",
                "tags": ["clinical", "curated"],
                "location": blob_ids["clean"],
                "created_at": "2024-05-02T09:00:00Z",
            },
        ),
        (
            "process",
            {
                "process_id": "prc-clean",
                "name": "clean-intake",
                "description": "Normalize units and drop incomplete rows for the prediction study",
                "language_program": "python",
                "code": blob_ids["clean_code"],
                "created_at": "2024-05-02T08:30:00Z",
                "last_modified_at": "2024-05-02T09:00:00Z",
                "source_datasets": ["ds-intake-raw"],
                "target_datasets": ["ds-intake-clean"],
                "operations": [
                    {"op_kind": "cleaning", "order_index": 0},
                    {"op_kind": "transformation", "order_index": 1, "parameters": {"units": "si"}},
                ],
                "executed_by": "u-amel",
            },
        ),
        (
            "study",
            {
                "study_id": "st-diab",
                "description": "Diabetes prediction",
                "study_type": "classification",
            },
        ),
        (
            "task",
            {
                "task_id": "tsk-screen",
                "description": "Early risk screening",
                "task_type": "classification",
            },
        ),
        (
            "analysis",
            {
                "analysis_id": "ana-0001",
                "description": "Gradient boosted classifier on the cleaned intake cohort",
                "analysis_type": "classification",
                "performed_by": "u-lin",
                "study": "st-diab",
                "task": "tsk-screen",
                "model_path": blob_ids["model"],
                "code": blob_ids["train_code"],
                "language_program": "python",
                "environment": "env-py311",
                "algorithm": ALGORITHM,
                "parameters": PARAMETERS,
                "used_datasets": [
                    {"dataset": "ds-intake-clean", "split": "train"},
                    {"dataset": "ds-intake-clean", "split": "test"},
                ],
                "target_feature": "diabetes_onset",
                "performance": {"accuracy": 0.87, "auc": 0.91},
                "performed_at": "2024-05-03T10:00:00Z",
            },
        ),
    ]


def diabetes_model_bytes() -> bytes:
    return train_model(
        [(CLEAN_CSV, "train"), (CLEAN_CSV, "test")],
        TRAIN_CODE,
        ENVIRONMENT,
        ALGORITHM,
        PARAMETERS,
    )


def diabetes_blobs(lake: ModelLake) -> dict:
    return {
        "raw": str(lake.put_blob(RAW_CSV, "dataset")),
        "clean": str(lake.put_blob(CLEAN_CSV, "dataset")),
        "clean_code": str(lake.put_blob(CLEAN_CODE, "code")),
        "train_code": str(lake.put_blob(TRAIN_CODE, "code")),
        "model": str(lake.put_blob(diabetes_model_bytes(), "model")),
    }


def build_diabetes_lake(lake: ModelLake) -> dict:
    """Register the whole fixture; returns ids keyed by role."""
    blob_ids = diabetes_blobs(lake)
    nodes = {}
    for record_type, payload in diabetes_records(blob_ids):
        node_id, _ = lake.register_payload(record_type, payload)
        nodes[payload[_alias_key(record_type)]] = node_id
    return {"blobs": blob_ids, "nodes": nodes}


def _alias_key(record_type: str) -> str:
    from modellake.records import ALIAS_FIELDS

    return ALIAS_FIELDS[record_type]


# ---------------------------------------------------------------------------
# Random pipeline graphs for the reachability oracle


def random_pipeline_graph(rng: random.Random, max_nodes: int = 100, max_edges: int = 300):
    """A random but structurally valid lineage graph built edge by edge.

    Mixes data-flow and contextual edges so traversal tests also prove the
    contextual kinds stay out of the closures.
    """
    graph = LineageGraph()
    counter = {"n": 0}

    def fresh(kind: str) -> str:
        counter["n"] += 1
        node_id = f"{kind}-{counter['n']:03d}"
        graph.add_node(node_id, kind)
        return node_id

    users = [fresh("user") for _ in range(rng.randint(1, 3))]
    envs = [fresh("environment") for _ in range(rng.randint(1, 2))]
    sources = [fresh("source") for _ in range(rng.randint(1, 3))]
    studies = [fresh("study") for _ in range(rng.randint(0, 2))]
    tasks = [fresh("task") for _ in range(rng.randint(0, 2))]
    datasets: list[str] = []
    analyses: list[str] = []

    def room(extra_nodes: int, extra_edges: int) -> bool:
        return (
            graph.node_count + extra_nodes <= max_nodes
            and graph.edge_count + extra_edges <= max_edges
        )

    def context(activity: str) -> None:
        if rng.random() < 0.8 and room(0, 1):
            graph.add_edge(activity, rng.choice(users), "attributed_to")
        if rng.random() < 0.5 and room(0, 1):
            graph.add_edge(activity, rng.choice(envs), "in_environment")

    for source in sources:
        for _ in range(rng.randint(1, 2)):
            if not room(2, 3):
                break
            ingest = fresh("ingest")
            dataset = fresh("dataset")
            graph.add_edge(ingest, source, "ingest_from")
            graph.add_edge(ingest, dataset, "ingest_to")
            context(ingest)
            datasets.append(dataset)

    for _ in range(rng.randint(2, 12)):
        if not datasets or not room(3, 6):
            break
        roll = rng.random()
        if roll < 0.4:
            process = fresh("process")
            code = fresh("code")
            inputs = rng.sample(datasets, k=min(len(datasets), rng.randint(1, 3)))
            outputs = [fresh("dataset") for _ in range(rng.randint(1, 2))]
            for d in inputs:
                graph.add_edge(process, d, "used_data")
            for d in outputs:
                graph.add_edge(d, process, "derived_from")
            graph.add_edge(process, code, "used_code")
            context(process)
            datasets.extend(outputs)
        elif roll < 0.75:
            analysis = fresh("analysis")
            code = fresh("code")
            model = fresh("model")
            inputs = rng.sample(datasets, k=min(len(datasets), rng.randint(1, 3)))
            for d in inputs:
                graph.add_edge(analysis, d, "used_data", split=rng.choice(["train", "test", "full"]))
            graph.add_edge(analysis, model, "generated_model")
            graph.add_edge(analysis, code, "used_code")
            context(analysis)
            if analyses and rng.random() < 0.4:
                older = rng.choice(analyses)
                if graph.version_successor(older) is None:
                    graph.add_edge(analysis, older, "previous_version")
            if studies and rng.random() < 0.4:
                graph.add_edge(analysis, rng.choice(studies), "member_of_study")
            if tasks and rng.random() < 0.3:
                graph.add_edge(analysis, rng.choice(tasks), "addresses_task")
            analyses.append(analysis)
        else:
            older = rng.choice(datasets)
            if graph.version_successor(older) is None:
                newer = fresh("dataset")
                graph.add_edge(newer, older, "previous_version")
                datasets.append(newer)
    return graph
