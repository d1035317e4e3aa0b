"""
Runtime configuration for the toolkit
"""

import os
from typing import Optional

from pydantic import BaseModel, Field

from .constants import DEFAULT_PRECISION_BITS, MAX_PRECISION_BITS, MIN_PRECISION_BITS

ENV_PREFIX = "FLT_VERIFY_"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class ToolkitConfig(BaseModel):
    """Settings shared by the CLI and the scan runner"""

    precision_bits: int = Field(
        DEFAULT_PRECISION_BITS, description="Starting precision (bits) for rigorous reals"
    )
    max_precision_bits: int = Field(
        MAX_PRECISION_BITS, description="Precision ceiling before a straddling enclosure errors"
    )
    jobs: int = Field(1, description="Worker threads used by range scans")
    log_level: str = Field("WARNING", description="Logging level: DEBUG, INFO, WARNING or ERROR")


def _env_int(name: str) -> Optional[int]:
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{ENV_PREFIX}{name} must be an integer, got {raw!r}") from None


def load_config(
    precision_bits: Optional[int] = None,
    max_precision_bits: Optional[int] = None,
    jobs: Optional[int] = None,
    log_level: Optional[str] = None,
) -> ToolkitConfig:
    """
    Build the configuration from explicit values, then environment variables, then defaults

    Args:
        precision_bits: Starting precision (defaults to env var FLT_VERIFY_PRECISION_BITS)
        max_precision_bits: Precision ceiling (defaults to env var FLT_VERIFY_MAX_PRECISION_BITS)
        jobs: Scan worker count (defaults to env var FLT_VERIFY_JOBS)
        log_level: Logging level name (defaults to env var FLT_VERIFY_LOG_LEVEL)

    Returns:
        Validated ToolkitConfig
    """
    values = {
        "precision_bits": precision_bits or _env_int("PRECISION_BITS") or DEFAULT_PRECISION_BITS,
        "max_precision_bits": max_precision_bits
        or _env_int("MAX_PRECISION_BITS")
        or MAX_PRECISION_BITS,
        "jobs": jobs or _env_int("JOBS") or 1,
        "log_level": (log_level or os.environ.get(ENV_PREFIX + "LOG_LEVEL") or "WARNING").upper(),
    }

    if values["precision_bits"] < MIN_PRECISION_BITS:
        raise ValueError(f"precision_bits must be at least {MIN_PRECISION_BITS}")
    if values["max_precision_bits"] < values["precision_bits"]:
        raise ValueError("max_precision_bits must not be below precision_bits")
    if values["jobs"] < 1:
        raise ValueError("jobs must be positive")
    if values["log_level"] not in LOG_LEVELS:
        raise ValueError(f"Unknown log level {values['log_level']!r}; use one of {LOG_LEVELS}")

    return ToolkitConfig(**values)
