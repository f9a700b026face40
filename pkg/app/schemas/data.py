"""Dataset source schemas."""

from enum import Enum
from pathlib import Path
from typing import Annotated, Literal

from pydantic import BaseModel, Field, FilePath, PositiveInt, ValidationInfo, field_validator, model_validator


class Split(str, Enum):
    """Split tag enum."""

    TRAIN = "train"
    VAL = "val"
    TEST = "test"
    FULL = "full"


class TextRule(str, Enum):
    """Synthetic text labelling rule."""

    ORDERED_PAIR = "ordered_pair"
    KEYWORD_MAJORITY = "keyword_majority"


def _resolve(value, info: ValidationInfo):
    """Resolve relative paths against the config file's directory (passed as context)."""
    base = (info.context or {}).get("base_dir")
    if base is not None and value is not None and not Path(value).is_absolute():
        return Path(base) / value
    return value


class _SourceBase(BaseModel):
    fractions: tuple[float, float, float] = (0.8, 0.1, 0.1)
    split_seed: int = Field(default=0, ge=0)
    subsample: PositiveInt | None = None

    @field_validator("fractions")
    @classmethod
    def _fractions_sum_to_one(cls, value: tuple[float, float, float]) -> tuple[float, float, float]:
        if any(f < 0 for f in value) or abs(sum(value) - 1.0) > 1e-9:
            raise ValueError(f"fractions must be non-negative and sum to 1, got {value}")
        return value


class MnistIdxSource(_SourceBase):
    """Official MNIST IDX files; the test split comes from the test files."""

    kind: Literal["mnist_idx"] = "mnist_idx"
    train_images: FilePath
    train_labels: FilePath
    test_images: FilePath
    test_labels: FilePath
    fractions: tuple[float, float, float] = (5 / 6, 1 / 6, 0.0)

    @field_validator("train_images", "train_labels", "test_images", "test_labels", mode="before")
    @classmethod
    def _resolve_paths(cls, value, info: ValidationInfo):
        return _resolve(value, info)

    @model_validator(mode="after")
    def _no_test_fraction(self) -> "MnistIdxSource":
        if self.fractions[2] != 0:
            raise ValueError("mnist_idx takes its test split from the test files; third fraction must be 0")
        return self


class TwoMoonsSource(_SourceBase):
    kind: Literal["two_moons"] = "two_moons"
    n: int = Field(ge=2)
    noise: float = Field(ge=0)
    seed: int = Field(default=0, ge=0)


class TextSyntheticSource(_SourceBase):
    kind: Literal["text_synthetic"] = "text_synthetic"
    vocab: int = Field(ge=8)
    length: int = Field(ge=2)
    n: int = Field(ge=2)
    rule: TextRule = TextRule.ORDERED_PAIR
    seed: int = Field(default=0, ge=0)


class CsvSource(_SourceBase):
    """CSV with header ``label,f0,...`` (features) or ``label,t0,...`` (token indices)."""

    kind: Literal["csv"] = "csv"
    path: FilePath
    num_classes: int | None = Field(default=None, ge=2)

    @field_validator("path", mode="before")
    @classmethod
    def _resolve_path(cls, value, info: ValidationInfo):
        return _resolve(value, info)


DataSource = Annotated[
    MnistIdxSource | TwoMoonsSource | TextSyntheticSource | CsvSource,
    Field(discriminator="kind"),
]
