"""Utility modules."""

from app.utils.storage import (
    file_sha256,
    load_checkpoint,
    save_checkpoint,
    write_csv,
    write_json,
    write_records,
)

__all__ = [
    "file_sha256",
    "load_checkpoint",
    "save_checkpoint",
    "write_csv",
    "write_json",
    "write_records",
]
