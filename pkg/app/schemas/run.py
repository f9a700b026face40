"""Run manifest schemas."""

from enum import Enum

from pydantic import BaseModel, Field

from app.schemas.data import DataSource
from app.schemas.model import ModelSpec
from app.schemas.train import TrainConfig


class RunKind(str, Enum):
    """Run type enum."""

    TRAIN = "train"
    SWEEP = "sweep"
    SCALING = "scaling"
    LANDSCAPE = "landscape"
    VERIFY_THEORY = "verify-theory"
    GRADCHECK = "gradcheck"
    DATA_GEN = "data-gen"


class RunStatus(str, Enum):
    """Run status enum."""

    COMPLETED = "completed"
    FAILED = "failed"
    ABORTED = "aborted"


class RunManifest(BaseModel):
    """Everything needed to re-run a command bit-exactly."""

    command: RunKind
    status: RunStatus
    argv: list[str]
    config_path: str | None = None
    config_sha256: str | None = None
    seeds: list[int] = []
    tool_version: str
    wall_seconds: float
    outputs: list[str] = []
    metrics: dict[str, float | int | str | None] = {}
    error_message: str | None = None


class RunRequest(BaseModel):
    """One training run as shipped to a worker: everything is plain JSON."""

    model: ModelSpec
    data: DataSource
    train: TrainConfig
    seed: int = Field(ge=0)
    subsample: int | None = Field(default=None, ge=1)


class RunSummary(BaseModel):
    """What a worker sends back for one training run."""

    seed: int
    test_accuracy: float | None
    best_epoch: int
    fb_count: int
    final_val_acc: float | None = None
