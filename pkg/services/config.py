# services/config.py
"""Centralized configuration for the pluq engine with environment variable support"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Set


@dataclass
class Config:
    """Configuration class with defaults and environment-friendly fields"""

    # Solver
    max_passes: int = 100

    # Logging
    log_file: str = "pluq.log"
    log_level: str = "INFO"

    # Output and statistics
    default_format: str = "json"
    default_free: int = 1
    seed: int = 20240601
    sweep: str = "2..8"

    # Keys that came from the environment and win over job files
    env_keys: Set[str] = field(default_factory=set)

    def __post_init__(self):
        """Load overrides from environment variables"""
        self.log_file = self._env_str("PLUQ_LOG_FILE", "log_file")
        self.log_level = self._env_str("PLUQ_LOG_LEVEL", "log_level").upper()
        self.default_format = self._env_str("PLUQ_FORMAT", "default_format")

        # Parse integer env vars safely, one at a time
        for env_name, key in (
            ("PLUQ_MAX_PASSES", "max_passes"),
            ("PLUQ_SEED", "seed"),
            ("PLUQ_DEFAULT_FREE", "default_free"),
        ):
            raw = os.getenv(env_name)
            if raw is None:
                continue
            try:
                setattr(self, key, int(raw))
                self.env_keys.add(key)
            except ValueError:
                pass

    def _env_str(self, env_name: str, key: str) -> str:
        raw = os.getenv(env_name)
        if raw is None:
            return getattr(self, key)
        self.env_keys.add(key)
        return raw

    def update_from_dict(self, data: dict) -> None:
        for key, value in data.items():
            if key in self.env_keys or key == "env_keys":
                continue
            if hasattr(self, key):
                setattr(self, key, value)
