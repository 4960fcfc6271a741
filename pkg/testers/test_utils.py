import json

import numpy as np
import pytest

from modules.data_structure import ExitCode, RunResponse
from modules.utils import available_memory_bytes, default_workers, derive_seeds, load_json_config, load_yaml_config


def test_load_yaml_config():
    app = load_yaml_config("configs/configs.yml", "app")
    assert app["name"] == "qlab"
    full = load_yaml_config("configs/configs.yml")
    assert full["simulation"]["max_amplitudes"] == 1 << 24
    assert load_yaml_config("configs/configs.yml", "absent") == {}
    with pytest.raises(FileNotFoundError, match="missing.yml"):
        load_yaml_config("configs/missing.yml")


def test_load_json_config(tmp_path):
    path = tmp_path / "grid.json"
    path.write_text(json.dumps({"sweep": {"p_x": [0.01, 0.02]}}))
    assert load_json_config(str(path), "sweep") == {"p_x": [0.01, 0.02]}
    assert load_json_config(str(path))["sweep"]["p_x"][1] == 0.02
    with pytest.raises(FileNotFoundError):
        load_json_config(str(tmp_path / "nope.json"))


def test_derived_seeds_are_stable():
    first = [np.random.default_rng(s).integers(1 << 30) for s in derive_seeds(99, 4)]
    again = [np.random.default_rng(s).integers(1 << 30) for s in derive_seeds(99, 6)[:4]]
    assert first == again
    assert len(set(first)) == 4


def test_default_workers(monkeypatch):
    monkeypatch.setenv("QLAB_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("QLAB_WORKERS", "0")
    assert default_workers() == 1
    monkeypatch.delenv("QLAB_WORKERS")
    assert default_workers() >= 1
    assert available_memory_bytes() > 0


def test_run_response_payloads():
    assert RunResponse.success({"a": 1}) == {"success": True, "content": {"a": 1}}
    assert RunResponse.failure("bad") == {"success": False, "content": "bad"}
    assert (ExitCode.success, ExitCode.usage, ExitCode.io) == (0, 2, 3)
