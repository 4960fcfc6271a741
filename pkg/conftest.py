from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent


@pytest.fixture(autouse=True)
def repo_root(monkeypatch):
    """Relative config and code-library paths resolve against the repository root."""
    monkeypatch.chdir(ROOT)
    return ROOT


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
