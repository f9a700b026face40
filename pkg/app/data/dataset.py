"""In-memory labelled datasets."""

from collections.abc import Iterator
from dataclasses import dataclass, field, replace

import numpy as np

from app.errors import DatasetError
from app.models.network import Batch
from app.schemas.data import Split


@dataclass(frozen=True)
class Dataset:
    """Inputs (float features or integer token indices) with integer class labels."""

    inputs: np.ndarray
    labels: np.ndarray
    num_classes: int
    split: Split = Split.FULL
    provenance: str = ""

    def __post_init__(self):
        if len(self.inputs) != len(self.labels):
            raise DatasetError(f"{len(self.inputs)} inputs but {len(self.labels)} labels")
        if self.num_classes < 2:
            raise DatasetError(f"num_classes must be >= 2, got {self.num_classes}")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise DatasetError(f"labels must lie in [0, {self.num_classes})")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def is_tokens(self) -> bool:
        return np.issubdtype(self.inputs.dtype, np.integer)

    def take(self, indices: np.ndarray, split: Split | None = None) -> "Dataset":
        return replace(
            self,
            inputs=self.inputs[indices],
            labels=self.labels[indices],
            split=split if split is not None else self.split,
        )

    def batch(self, indices: np.ndarray | None = None) -> Batch:
        if indices is None:
            return Batch(self.inputs, self.labels)
        return Batch(self.inputs[indices], self.labels[indices])

    def batches(self, order: np.ndarray, batch_size: int) -> Iterator[Batch]:
        for start in range(0, len(order), batch_size):
            yield self.batch(order[start : start + batch_size])


@dataclass(frozen=True)
class DatasetSplits:
    train: Dataset
    val: Dataset
    test: Dataset
    extra: dict[str, str] = field(default_factory=dict)

    def get(self, split: str) -> Dataset:
        return {"train": self.train, "val": self.val, "test": self.test}[split]
