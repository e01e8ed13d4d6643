"""
Environment configuration for hermspde.
Values are read from a .env file (if present) and HERMSPDE_* variables.
"""
import os
from functools import lru_cache
from typing import Literal

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from src.utils.errors import ConfigError


class Settings(BaseModel):
    """Process-level knobs that are not part of an experiment config."""
    threads: int = Field(default=1, ge=1, description="Worker cap for ensemble simulation")
    max_basis_size: int = Field(default=1_000_000, ge=1, description="Cap on C(N+d, d)")
    eigensolver: Literal["jacobi", "lapack"] = Field(default="jacobi", description="Extremal eigenvalue method")
    jacobi_max_dim: int = Field(default=2000, ge=1, description="Largest matrix handed to Jacobi")
    log_level: str = Field(default="INFO", description="CLI logging level")


_ENV_FIELDS = {
    "threads": "HERMSPDE_THREADS",
    "max_basis_size": "HERMSPDE_MAX_BASIS_SIZE",
    "eigensolver": "HERMSPDE_EIGENSOLVER",
    "jacobi_max_dim": "HERMSPDE_JACOBI_MAX_DIM",
    "log_level": "HERMSPDE_LOG_LEVEL",
}


def load_settings() -> Settings:
    """
    Build settings from the environment.

    Returns:
        Validated Settings

    Raises:
        ConfigError: if a variable is present but invalid
    """
    load_dotenv()

    values = {}
    for field_name, env_name in _ENV_FIELDS.items():
        raw = os.getenv(env_name)
        if raw is not None and raw.strip():
            values[field_name] = raw.strip()

    try:
        return Settings(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid HERMSPDE_* environment setting: {e}") from e


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Cached process settings."""
    return load_settings()
