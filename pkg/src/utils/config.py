"""Configuration utilities for drift-bench experiments."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

load_dotenv()


@dataclass(frozen=True)
class AppConfig:
    """Application configuration resolved from environment variables."""

    output_dir: Path
    log_level: str = "INFO"
    seed: int = 42
    jobs: int = 1
    electricity_path: Optional[Path] = None
    covertype_path: Optional[Path] = None


def _normalize_path(path_str: str) -> Path:
    """Ensure a path is absolute and expanded."""

    raw_path = Path(path_str).expanduser()
    if raw_path.is_absolute():
        return raw_path
    return (Path.cwd() / raw_path).resolve()


def _optional_path(name: str) -> Optional[Path]:
    value = os.getenv(name, "").strip()
    return _normalize_path(value) if value else None


def load_config(output_dir_override: Optional[str] = None) -> AppConfig:
    """Load application configuration, optionally overriding the output directory."""

    output_dir_env = output_dir_override or os.getenv("DRIFT_OUTPUT_DIR", "results")
    log_level_env = os.getenv("DRIFT_LOG_LEVEL", "INFO").upper()

    return AppConfig(
        output_dir=_normalize_path(output_dir_env),
        log_level=log_level_env,
        seed=int(os.getenv("DRIFT_SEED", "42")),
        jobs=max(1, int(os.getenv("DRIFT_JOBS", "1"))),
        electricity_path=_optional_path("DRIFT_ELECTRICITY_PATH"),
        covertype_path=_optional_path("DRIFT_COVERTYPE_PATH"),
    )


def configure_logging(level: str) -> None:
    """Configure root logging with a consistent format."""

    numeric_level = getattr(logging, level.upper(), logging.INFO)
    root_logger = logging.getLogger()

    if not root_logger.handlers:
        logging.basicConfig(
            level=numeric_level,
            format="%(asctime)s [%(levelname)s] %(name)s - %(message)s",
        )
    else:
        root_logger.setLevel(numeric_level)
    # font_manager floods DEBUG output while plotting
    logging.getLogger("matplotlib").setLevel(max(numeric_level, logging.WARNING))


__all__ = ["AppConfig", "load_config", "configure_logging"]
