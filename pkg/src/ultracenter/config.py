"""
Configuration loading for ultracenter.
"""
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field, ValidationError

from .errors import ConfigError

logger = logging.getLogger(__name__)

CONFIG_ENV = "ULTRACENTER_CONFIG"
CAP_ENV = "ULTRACENTER_CAP"
WORKERS_ENV = "ULTRACENTER_WORKERS"


class EnumerationSettings(BaseModel):
    cap: int = Field(9, ge=1)
    workers: int = Field(1, ge=1)


class ConstructionSettings(BaseModel):
    max_points: int = Field(2**16, ge=1)


class ExportSettings(BaseModel):
    dot_max_points: int = Field(64, ge=2)


class LoggingSettings(BaseModel):
    level: str = "WARNING"


class Settings(BaseModel):
    """All tunable knobs; every field has a built-in default."""

    enumeration: EnumerationSettings = Field(default_factory=EnumerationSettings)
    constructions: ConstructionSettings = Field(default_factory=ConstructionSettings)
    export: ExportSettings = Field(default_factory=ExportSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)


def find_config_path() -> Optional[Path]:
    """Locate a config file: the env var first, then the usual places."""
    configured = os.environ.get(CONFIG_ENV)
    if configured:
        return Path(configured)

    possible_paths = [
        Path("config/default.json"),
        Path.home() / ".config" / "ultracenter" / "config.json",
        Path(__file__).parent.parent.parent / "config" / "default.json",
    ]
    for path in possible_paths:
        if path.exists():
            return path
    return None


def load_settings(config_path: Optional[Path] = None) -> Settings:
    """
    Load settings from a JSON file and apply environment overrides.

    Args:
        config_path: Explicit file; when None the file is searched for

    Returns:
        Settings with built-in defaults for anything the file omits

    Raises:
        ConfigError: if the file cannot be read or does not match the schema
    """
    path = config_path if config_path is not None else find_config_path()
    data: Dict[str, Any] = {}
    if path is not None:
        logger.debug(f"Loading config from {path}")
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Failed to load config {path}: {e}") from e

    try:
        settings = Settings.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid config {path}: {e}") from e

    enumeration = settings.enumeration.model_dump()
    for key, env in (("cap", CAP_ENV), ("workers", WORKERS_ENV)):
        raw = os.environ.get(env)
        if raw:
            try:
                enumeration[key] = int(raw)
            except ValueError as e:
                raise ConfigError(f"{env} must be an integer, got {raw!r}") from e
    try:
        return settings.model_copy(
            update={"enumeration": EnumerationSettings.model_validate(enumeration)}
        )
    except ValidationError as e:
        raise ConfigError(f"Invalid environment override: {e}") from e
