"""Build a small demonstration lake for console tests; prints ids as JSON.

Usage: python3 fixture.py <data_dir>
Requires the modellake package (pip install -e ../..).
"""

import json
import sys

from modellake import ModelLake, init_data_dir


def main() -> None:
    data_dir = sys.argv[1]
    init_data_dir(data_dir)
    with ModelLake(data_dir) as lake:
        raw = str(lake.put_blob(b"age,bmi\n63,31.2\n45,27.9\n", "dataset"))
        clean = str(lake.put_blob(b"age,bmi\n63,31.2\n45,27.9\n# ok\n", "dataset"))
        clean_code = str(lake.put_blob(b"def clean(r): return r\n", "code"))
        train_code = str(lake.put_blob(b"def fit(d): return 'gb'\n", "code"))
        model = str(lake.put_blob(b"console-model-bytes", "model"))
        reg = lake.register_payload
        reg("user", {"user_id": "u-amel", "name": "Amel Diallo", "role": "data_engineer"})
        reg("user", {"user_id": "u-lin", "name": "Lin Osei", "role": "data_scientist"})
        reg(
            "source",
            {
                "source_id": "src-clinic",
                "name": "Toulouse clinic registry",
                "source_type": "csv-file",
                "description": "Anonymized clinical export",
                "owner": "u-amel",
                "location": "https://clinic.example.org/exports/intake.csv",
                "created_at": "2024-04-02T08:00:00Z",
            },
        )
        reg("environment", {"env_id": "env-py311", "name": "py311",
                            "runtime_descriptors": {"python": "3.11.8"}, "hardware": "x86_64"})
        reg(
            "dataset",
            {
                "dataset_id": "ds-intake-raw",
                "name": "clinic-intake-raw",
                "format": "csv",
                "description": "Raw clinic intake export",
                "tags": ["clinical", "intake"],
                "location": raw,
                "created_at": "2024-05-01T11:55:00Z",
                "metafeatures": {"n_rows": 2, "n_attributes": 2},
                "source": "src-clinic",
            },
        )
        reg(
            "ingest",
            {
                "ingest_id": "ing-0001",
                "mode": "batch",
                "comments": "Initial load",
                "from_source": "src-clinic",
                "to_dataset": "ds-intake-raw",
                "ingested_by": "u-amel",
                "access_url": "https://lake.example.org/raw/intake.csv",
                "ingested_at": "2024-05-01T12:00:00Z",
                "environment": "env-py311",
            },
        )
        reg(
            "dataset",
            {
                "dataset_id": "ds-intake-clean",
                "name": "clinic-intake-clean",
                "format": "csv",
                "description": "Cleaned intake cohort",
                "tags": ["clinical", "curated"],
                "location": clean,
                "created_at": "2024-05-02T09:00:00Z",
            },
        )
        reg(
            "process",
            {
                "process_id": "prc-clean",
                "name": "clean-intake",
                "description": "Normalize units for the prediction study",
                "language_program": "python",
                "code": clean_code,
                "created_at": "2024-05-02T08:30:00Z",
                "last_modified_at": "2024-05-02T09:00:00Z",
                "source_datasets": ["ds-intake-raw"],
                "target_datasets": ["ds-intake-clean"],
                "operations": [{"op_kind": "cleaning", "order_index": 0}],
                "executed_by": "u-amel",
            },
        )
        reg("study", {"study_id": "st-diab", "description": "Diabetes prediction",
                      "study_type": "classification"})
        reg("task", {"task_id": "tsk-screen", "description": "Early risk screening",
                     "task_type": "classification"})
        analysis_node, _ = reg(
            "analysis",
            {
                "analysis_id": "ana-0001",
                "description": "Gradient boosted classifier on the cleaned cohort",
                "analysis_type": "classification",
                "performed_by": "u-lin",
                "study": "st-diab",
                "task": "tsk-screen",
                "model_path": model,
                "code": train_code,
                "language_program": "python",
                "environment": "env-py311",
                "algorithm": {"name": "GradientBoosting", "family": "ensemble"},
                "parameters": [{"name": "max_depth", "value": "3", "value_type": "int"}],
                "used_datasets": [{"dataset": "ds-intake-clean", "split": "train"}],
                "performance": {"accuracy": 0.87, "auc": 0.91},
                "performed_at": "2024-05-03T10:00:00Z",
            },
        )
    print(json.dumps({"data_dir": data_dir, "study": "st-diab", "model": model,
                      "analysis": analysis_node}))


if __name__ == "__main__":
    main()
