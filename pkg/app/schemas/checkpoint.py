"""Checkpoint file schema."""

from typing import Literal

from pydantic import BaseModel

from app.schemas.model import ModelSpec

CHECKPOINT_FORMAT = "dropattack-checkpoint"


class TensorPayload(BaseModel):
    """A float64 tensor as little-endian bytes, base64 encoded."""

    shape: list[int]
    data: str


class Checkpoint(BaseModel):
    format: Literal["dropattack-checkpoint"] = CHECKPOINT_FORMAT
    version: Literal[1] = 1
    spec: ModelSpec
    attackable: list[str]
    tensors: dict[str, TensorPayload]
    metadata: dict[str, float | int | str | None] = {}
