from pathlib import Path

import pytest

from services.config import Config
from services.engine import PluqEngine
from services.jobspec import parse_jobspec

JOBS = Path(__file__).resolve().parent.parent / "jobs"

ENV_KEYS = ("PLUQ_MAX_PASSES", "PLUQ_LOG_FILE", "PLUQ_LOG_LEVEL", "PLUQ_FORMAT", "PLUQ_SEED", "PLUQ_DEFAULT_FREE")


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in ENV_KEYS:
        monkeypatch.delenv(key, raising=False)
    monkeypatch.setenv("PLUQ_LOG_FILE", "")


@pytest.fixture
def jobs_dir():
    return JOBS


@pytest.fixture
def load_job():
    def _load(name):
        return parse_jobspec((JOBS / name).read_text(encoding="utf-8"))
    return _load


@pytest.fixture
def engine():
    return PluqEngine(Config())
