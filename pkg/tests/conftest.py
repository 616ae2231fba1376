import os

import pytest

from randtext.schemas import ModelParams
from randtext.storage import reset_storage_provider

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(autouse=True)
def isolated_environment(tmp_path, monkeypatch):
    """Every test runs against default settings with outputs under its own tmp dir."""
    monkeypatch.setenv("RANDTEXT_CONFIG", str(tmp_path / "missing-config.yaml"))
    monkeypatch.setenv("RANDTEXT_OUTPUT_DIR", str(tmp_path / "out"))
    monkeypatch.delenv("RANDTEXT_METRICS_FILE", raising=False)
    monkeypatch.delenv("RANDTEXT_LOG_FILE", raising=False)
    reset_storage_provider()
    yield
    reset_storage_provider()


@pytest.fixture
def english_params():
    return ModelParams(m=26, q=0.2)


@pytest.fixture
def fixture_path():
    def _path(name: str) -> str:
        return os.path.join(FIXTURES, name)
    return _path
