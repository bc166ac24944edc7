import logging

from main import configure_logging
from services.config import Config


def test_defaults():
    config = Config()
    assert config.max_passes == 100
    assert config.default_format == "json"
    assert config.sweep == "2..8"
    assert config.log_file == ""


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("PLUQ_MAX_PASSES", "7")
    monkeypatch.setenv("PLUQ_LOG_LEVEL", "debug")
    monkeypatch.setenv("PLUQ_FORMAT", "latex")
    config = Config()
    assert config.max_passes == 7
    assert config.log_level == "DEBUG"
    assert config.default_format == "latex"
    assert {"max_passes", "log_level", "default_format"} <= config.env_keys


def test_environment_wins_over_job_values(monkeypatch):
    monkeypatch.setenv("PLUQ_MAX_PASSES", "7")
    config = Config()
    config.update_from_dict({"max_passes": 3, "seed": 5, "unknown": 1})
    assert config.max_passes == 7
    assert config.seed == 5
    assert not hasattr(config, "unknown")


def test_malformed_integer_keeps_default(monkeypatch):
    monkeypatch.setenv("PLUQ_SEED", "abc")
    config = Config()
    assert config.seed == 20240601
    assert "seed" not in config.env_keys


def test_logging_without_file():
    configure_logging(Config())
    handlers = logging.getLogger().handlers
    assert not any(isinstance(h, logging.FileHandler) for h in handlers)


def test_logging_to_file(monkeypatch, tmp_path):
    target = tmp_path / "pluq.log"
    monkeypatch.setenv("PLUQ_LOG_FILE", str(target))
    configure_logging(Config())
    logging.getLogger("pluq").info("hello")
    for h in logging.getLogger().handlers:
        h.flush()
    assert "hello" in target.read_text(encoding="utf-8")
    monkeypatch.setenv("PLUQ_LOG_FILE", "")
    configure_logging(Config())
