"""Application configuration."""

import re
import sys
from functools import lru_cache
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - same API, stdlib backport
    import tomli as tomllib

from pydantic import ValidationError
from pydantic_settings import BaseSettings

from app.errors import ConfigError
from app.schemas.experiment import ExperimentConfig, SweepGrid


class Settings(BaseSettings):
    """Runtime settings loaded from environment variables."""

    # Outputs
    output_root: Path = Path("runs")
    record_wall_time: bool = False

    # Worker pool
    workers: int = 1

    # Redis (Celery broker/backend); empty means run in-process
    redis_url: str = ""

    # App
    log_level: str = "INFO"

    model_config = {
        "env_prefix": "DROPATTACK_",
        "env_file": ".env",
        "env_file_encoding": "utf-8",
    }


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


def _line_of(source: str, key: str) -> int | None:
    pattern = re.compile(rf"^\s*{re.escape(key)}\s*=")
    for number, line in enumerate(source.splitlines(), start=1):
        if pattern.match(line):
            return number
    return None


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    """Read and validate a TOML experiment config.

    Relative file paths inside the config resolve against the config's directory. Every failure
    is raised as ``ConfigError`` carrying the path and, when known, the field and line.
    """
    path = Path(path)
    try:
        source = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror or exc}") from exc
    try:
        raw = tomllib.loads(source)
    except tomllib.TOMLDecodeError as exc:
        match = re.search(r"line (\d+)", str(exc))
        raise ConfigError(str(path), f"invalid TOML: {exc}", line=int(match.group(1)) if match else None) from exc
    try:
        return ExperimentConfig.model_validate(raw, context={"base_dir": path.parent})
    except ValidationError as exc:
        error = exc.errors()[0]
        loc = [str(part) for part in error["loc"]]
        keys = [part for part in loc if not part.isdigit() and part in source]
        line = _line_of(source, keys[-1]) if keys else None
        raise ConfigError(str(path), error["msg"], field=".".join(loc) or None, line=line) from exc


def load_sweep_grid(path: str | Path) -> SweepGrid:
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
        return SweepGrid.model_validate(raw.get("grid", raw))
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read grid file: {exc.strerror or exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(path), f"invalid TOML: {exc}") from exc
    except ValidationError as exc:
        error = exc.errors()[0]
        raise ConfigError(str(path), error["msg"], field=".".join(str(p) for p in error["loc"])) from exc
