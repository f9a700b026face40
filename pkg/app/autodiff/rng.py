"""Seeded random streams.

Every random draw in the laboratory (initialization, masks, dropout, shuffles, landscape
directions) goes through :class:`Rng`. The generator is numpy's counter-based Philox4x64-10
keyed by a ``SeedSequence``, which gives the same stream for the same seed on every platform.
Independent streams are derived with :meth:`Rng.child`, never by reseeding from the OS.
"""

import zlib

import numpy as np

ALGORITHM = "philox4x64-10"


def _label_to_int(label: int | str) -> int:
    if isinstance(label, str):
        return zlib.crc32(label.encode("utf-8"))
    if label < 0:
        raise ValueError(f"stream labels must be non-negative, got {label}")
    return int(label)


class Rng:
    """Deterministic random stream identified by ``(seed, key)``."""

    algorithm = ALGORITHM

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        self.seed = int(seed)
        self.key = tuple(key)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        self._gen = np.random.Generator(np.random.Philox(sequence))

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, key={self.key}, algorithm={self.algorithm!r})"

    def child(self, *labels: int | str) -> "Rng":
        """Derive an independent stream; the same labels always give the same stream."""
        return Rng(self.seed, self.key + tuple(_label_to_int(label) for label in labels))

    def uniform(self, low: float, high: float, shape: tuple[int, ...]) -> np.ndarray:
        return self._gen.uniform(low, high, size=shape)

    def normal(self, shape: tuple[int, ...], scale: float = 1.0) -> np.ndarray:
        return self._gen.normal(0.0, scale, size=shape)

    def bernoulli(self, p: float, shape: tuple[int, ...]) -> np.ndarray:
        """0/1 float64 array, each element 1 with probability ``p``.

        p=1 yields all ones and p=0 all zeros since draws lie in [0, 1).
        """
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {p}")
        return (self._gen.random(size=shape) < p).astype(np.float64)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def integers(self, low: int, high: int, shape: tuple[int, ...]) -> np.ndarray:
        return self._gen.integers(low, high, size=shape)
