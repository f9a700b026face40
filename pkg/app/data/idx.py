"""MNIST IDX reader.

Data format (big endian):
    u32 | magic (0x00000803 images, 0x00000801 labels)
    u32 | item count
    u32 | row count, u32 | column count   (images only)
    u8[] | pixels row-wise / labels
"""

import struct
from pathlib import Path

import numpy as np

from app.data.dataset import Dataset
from app.errors import IdxFormatError

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


def _read_header(raw: bytes, path: Path, magic: int, dims: int) -> tuple[int, ...]:
    header_size = 4 * (1 + dims)
    if len(raw) < header_size:
        raise IdxFormatError(f"{path}: truncated header: need {header_size} bytes, file has {len(raw)}")
    found, *sizes = struct.unpack(f">{1 + dims}I", raw[:header_size])
    if found != magic:
        raise IdxFormatError(f"{path}: bad magic 0x{found:08x}, expected 0x{magic:08x}")
    expected = header_size + int(np.prod(sizes))
    if len(raw) < expected:
        raise IdxFormatError(
            f"{path}: truncated payload: expected bytes [{header_size}, {expected}), file ends at {len(raw)}"
        )
    return tuple(sizes)


def read_idx_images(path: str | Path) -> np.ndarray:
    """(count, 1, rows, cols) float64 pixels scaled to [0, 1]."""
    path = Path(path)
    raw = path.read_bytes()
    count, rows, cols = _read_header(raw, path, IMAGES_MAGIC, 3)
    pixels = np.frombuffer(raw, dtype=np.uint8, count=count * rows * cols, offset=16)
    return pixels.reshape(count, 1, rows, cols).astype(np.float64) / 255.0


def read_idx_labels(path: str | Path) -> np.ndarray:
    path = Path(path)
    raw = path.read_bytes()
    (count,) = _read_header(raw, path, LABELS_MAGIC, 1)
    return np.frombuffer(raw, dtype=np.uint8, count=count, offset=8).astype(np.int64)


def load_mnist_idx(images_path: str | Path, labels_path: str | Path) -> Dataset:
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if len(images) != len(labels):
        raise IdxFormatError(f"{images_path} has {len(images)} images but {labels_path} has {len(labels)} labels")
    return Dataset(images, labels, num_classes=10, provenance=f"idx:{images_path}|{labels_path}")


def write_idx(path: str | Path, array: np.ndarray) -> None:
    """Write uint8 images (count, rows, cols) or labels (count,) in IDX format."""
    array = np.asarray(array, dtype=np.uint8)
    if array.ndim == 3:
        header = struct.pack(">4I", IMAGES_MAGIC, *array.shape)
    elif array.ndim == 1:
        header = struct.pack(">2I", LABELS_MAGIC, array.shape[0])
    else:
        raise IdxFormatError(f"IDX writer supports (count, rows, cols) or (count,), got {array.shape}")
    Path(path).write_bytes(header + array.tobytes())
