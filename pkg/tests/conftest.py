from __future__ import annotations

import sys
from pathlib import Path

import pytest

SRC = Path(__file__).resolve().parents[1] / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from modellake import ModelLake, init_data_dir  # noqa: E402


@pytest.fixture
def lake(tmp_path) -> ModelLake:
    root = tmp_path / "lake"
    init_data_dir(root)
    handle = ModelLake(root)
    yield handle
    handle.close()


@pytest.fixture
def lake_dir(tmp_path):
    root = tmp_path / "lake"
    init_data_dir(root)
    return root


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        criterion = marker.kwargs.get("criterion", marker.args[0] if marker.args else "?")
        title = marker.kwargs.get("title", item.name)
        status = "PASS" if report.passed else "FAIL"
        capman = item.config.pluginmanager.getplugin("capturemanager")
        line = f"[acceptance {criterion}] {title}: {status}"
        if capman is not None:
            with capman.global_and_fixture_disabled():
                print(f"\n{line}", flush=True)
        else:
            print(f"\n{line}", flush=True)
