# haptickit/config.py
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

# Load environment variables (e.g., default geometry file, log level)
load_dotenv()

ENV_GEOMETRY = "HAPTICKIT_GEOMETRY"
ENV_LOG_LEVEL = "HAPTICKIT_LOG_LEVEL"
ENV_WORKERS = "HAPTICKIT_WORKERS"


@dataclass(frozen=True)
class Settings:
    geometry_path: Optional[str] = None
    log_level: str = "WARNING"
    workers: int = 1

    @classmethod
    def from_env(cls) -> "Settings":
        level = (os.getenv(ENV_LOG_LEVEL) or "WARNING").upper()
        if not isinstance(logging.getLevelName(level), int):
            level = "WARNING"
        try:
            workers = max(1, int(os.getenv(ENV_WORKERS, "1")))
        except ValueError:
            workers = 1
        return cls(
            geometry_path=os.getenv(ENV_GEOMETRY) or None,
            log_level=level,
            workers=workers,
        )


def configure_logging(level: str) -> None:
    """Only the CLI calls this; library modules never touch handlers."""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )
