"""Experiment configuration schemas (the TOML config files)."""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, PositiveInt, field_validator

from app.schemas.attack import AttackConfig
from app.schemas.data import DataSource
from app.schemas.model import Architecture, ModelSpec
from app.schemas.train import TrainConfig

SCHEMA_VERSION = 1


class LandscapeSettings(BaseModel):
    """Loss-landscape grid: ``resolution`` points per axis over ``[-span, span]``."""

    resolution: PositiveInt = 101
    span: float = Field(default=1.0, gt=0)
    seed: int = Field(default=0, ge=0)
    center_window: PositiveInt = 51
    split: Literal["train", "val", "test"] = "test"

    @field_validator("resolution", "center_window")
    @classmethod
    def _odd(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError(f"must be odd so that (0, 0) is a grid point, got {value}")
        return value


class TheorySettings(BaseModel):
    """First-order equivalence check settings."""

    epsilons: list[float] = [1e-4, 1e-3, 1e-2, 1e-1]
    batch_size: PositiveInt = 64
    p_x: float = Field(default=0.7, ge=0, le=1)
    p_theta: float = Field(default=0.7, ge=0, le=1)
    targets: list[str] | None = None

    @field_validator("epsilons")
    @classmethod
    def _grid(cls, value: list[float]) -> list[float]:
        if len(value) < 2 or any(e <= 0 for e in value) or any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("epsilons must be positive and strictly increasing")
        if value[-1] / value[0] < 100:
            raise ValueError("epsilons must span at least two decades")
        return value


class SweepGrid(BaseModel):
    """Grid file for ``sweep``."""

    epsilon: list[float] = Field(min_length=1)
    p: list[float] = Field(min_length=1)
    k: list[PositiveInt] = [1]
    replicates: PositiveInt = 1


class ExperimentConfig(BaseModel):
    """One experiment: model, data, training, optional analysis sections."""

    schema_version: Literal[1] = SCHEMA_VERSION
    out_dir: Path | None = None
    seeds: list[int] = Field(default=[0], min_length=1)
    model: ModelSpec
    data: DataSource
    train: TrainConfig
    landscape: LandscapeSettings | None = None
    theory: TheorySettings | None = None

    @field_validator("model")
    @classmethod
    def _known_arch(cls, value: ModelSpec) -> ModelSpec:
        known = {a.value for a in Architecture}
        if value.arch not in known:
            raise ValueError(f"unknown architecture {value.arch!r}; expected one of {sorted(known)}")
        return value

    @property
    def attack(self) -> AttackConfig | None:
        return self.train.attack
