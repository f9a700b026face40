"""Run artifacts on local disk: CSV tables, JSON manifests and checkpoints."""

import base64
import csv
import hashlib
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np
from pydantic import BaseModel

from app.models import build
from app.models.network import Network
from app.models.params import ParameterSet
from app.schemas.checkpoint import Checkpoint, TensorPayload

logger = logging.getLogger(__name__)

METRICS_COLUMNS = ["epoch", "train_loss", "train_acc", "val_loss", "val_acc", "seconds", "fb_count"]
SWEEP_COLUMNS = ["epsilon", "p", "K", "seed_count", "mean_test_acc", "std_test_acc"]
SCALING_COLUMNS = ["size", "standard_acc", "dropattack_acc", "improvement"]
LANDSCAPE_COLUMNS = ["delta", "eta", "loss"]
EQUIVALENCE_COLUMNS = ["epsilon", "gap", "surrogate", "adversarial"]


def sha256_bytes(content: bytes) -> str:
    return hashlib.sha256(content).hexdigest()


def file_sha256(path: str | Path) -> str:
    return sha256_bytes(Path(path).read_bytes())


def _cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float | np.floating):
        return repr(float(value))
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """CSV with ``\\n`` line endings; floats are written with ``repr`` so they reload exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def write_records(path: str | Path, columns: Sequence[str], records: Iterable[BaseModel]) -> Path:
    """One CSV row per pydantic record, columns picked by field name."""
    return write_csv(path, columns, ([getattr(r, c) for c in columns] for r in records))


def write_json(path: str | Path, model: BaseModel) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8", newline="\n")
    return path


def _encode(values: np.ndarray) -> TensorPayload:
    raw = np.ascontiguousarray(values, dtype="<f8").tobytes()
    return TensorPayload(shape=list(values.shape), data=base64.b64encode(raw).decode("ascii"))


def _decode(payload: TensorPayload) -> np.ndarray:
    raw = base64.b64decode(payload.data)
    return np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(payload.shape)


def save_checkpoint(path: str | Path, network: Network, metadata: dict | None = None) -> str:
    """Write spec, attackable set and parameters; returns the file's SHA-256 as checkpoint id."""
    checkpoint = Checkpoint(
        spec=network.spec,
        attackable=sorted(network.params.attackable),
        tensors={name: _encode(values) for name, values in network.params.arrays().items()},
        metadata=metadata or {},
    )
    write_json(path, checkpoint)
    checkpoint_id = file_sha256(path)
    logger.info("checkpoint %s written to %s", checkpoint_id[:12], path)
    return checkpoint_id


def load_checkpoint(path: str | Path) -> tuple[Network, str]:
    """Rebuild the network bit-exactly; returns it with the checkpoint id."""
    path = Path(path)
    content = path.read_bytes()
    checkpoint = Checkpoint.model_validate_json(content)
    network = build(checkpoint.spec)
    expected = set(network.params)
    if set(checkpoint.tensors) != expected:
        raise ValueError(f"{path}: tensors {sorted(checkpoint.tensors)} do not match the model's {sorted(expected)}")
    params = ParameterSet(
        [(name, _decode(checkpoint.tensors[name])) for name in network.params],
        attackable=checkpoint.attackable,
    )
    return network.with_params(params), sha256_bytes(content)
