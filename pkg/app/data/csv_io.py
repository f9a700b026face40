"""Generic CSV datasets: header ``label,f0,f1,...`` (features) or ``label,t0,t1,...`` (tokens)."""

from pathlib import Path

import numpy as np

from app.data.dataset import Dataset
from app.errors import DatasetError


def load_csv_dataset(path: str | Path, num_classes: int | None = None) -> Dataset:
    path = Path(path)
    with path.open(encoding="utf-8") as f:
        header = f.readline().strip().split(",")
    if len(header) < 2 or header[0] != "label":
        raise DatasetError(f"{path}: header must start with 'label', got {header[:3]}")
    prefixes = {column[0] for column in header[1:]}
    if prefixes not in ({"f"}, {"t"}):
        raise DatasetError(f"{path}: feature columns must all be f<i> or all t<i>")
    tokens = prefixes == {"t"}

    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    labels = table[:, 0].astype(np.int64)
    inputs = table[:, 1:].astype(np.int64) if tokens else table[:, 1:]
    classes = num_classes if num_classes is not None else int(labels.max()) + 1
    return Dataset(inputs, labels, num_classes=max(classes, 2), provenance=f"csv:{path}")


def write_csv_dataset(path: str | Path, dataset: Dataset) -> None:
    """Write a dataset as CSV; floats use ``repr`` so a reload is bit-exact."""
    inputs = dataset.inputs.reshape(len(dataset), -1)
    prefix = "t" if dataset.is_tokens else "f"
    header = ",".join(["label", *(f"{prefix}{i}" for i in range(inputs.shape[1]))])
    fmt = str if dataset.is_tokens else repr
    lines = [header]
    for label, row in zip(dataset.labels, inputs):
        lines.append(",".join([str(int(label)), *(fmt(v.item()) for v in row)]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
