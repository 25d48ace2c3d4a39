"""
Runtime settings read from the process environment.

Handles:
- `.env` loading from the project root (process variables take precedence)
- Parsing and validation of the DFM_* keys
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional

ENV_FILE = Path(__file__).resolve().parents[2] / ".env"

OUTPUT_FORMATS = ("json", "text")


def _env_str(name: str, default: str) -> str:
    value = os.getenv(name, "").strip()
    return value or default


def _env_int(name: str) -> Optional[int]:
    """Integer value of `name`, or None when unset or blank."""
    raw = os.getenv(name, "").strip()
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{name} must be an integer when set") from exc


def _load_env_file(path: Path) -> None:
    """Copy KEY=VALUE lines of `path` into os.environ without overwriting."""
    if not path.is_file():
        return

    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line.startswith("export "):
            line = line[len("export "):].lstrip()
        if line.startswith("#") or "=" not in line:
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        if key:
            os.environ.setdefault(key, value.strip().strip("'\""))


@dataclass(frozen=True)
class Settings:
    DFM_SEED: Optional[int] = None
    DFM_THREADS: int = 1
    DFM_LOG_LEVEL: str = "INFO"
    DFM_OUTPUT_FORMAT: str = "json"
    DFM_DATA_DIR: str = "data"

    @classmethod
    def from_env(cls) -> "Settings":
        threads = _env_int("DFM_THREADS")
        if threads is not None and threads < 1:
            raise ValueError("DFM_THREADS must be a positive integer")

        output_format = _env_str("DFM_OUTPUT_FORMAT", "json").lower()
        if output_format not in OUTPUT_FORMATS:
            raise ValueError(f"DFM_OUTPUT_FORMAT must be one of {', '.join(OUTPUT_FORMATS)}")

        return cls(
            DFM_SEED=_env_int("DFM_SEED"),
            DFM_THREADS=threads or 1,
            DFM_LOG_LEVEL=_env_str("DFM_LOG_LEVEL", "INFO").upper(),
            DFM_OUTPUT_FORMAT=output_format,
            DFM_DATA_DIR=_env_str("DFM_DATA_DIR", "data"),
        )


@lru_cache
def get_settings() -> Settings:
    _load_env_file(ENV_FILE)
    return Settings.from_env()
