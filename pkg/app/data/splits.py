"""Deterministic partitioning and nested subsampling."""

import numpy as np

from app.autodiff import Rng
from app.data.dataset import Dataset, DatasetSplits
from app.errors import DatasetError
from app.schemas.data import Split


def split(dataset: Dataset, fractions: tuple[float, float, float], seed: int) -> DatasetSplits:
    """Shuffle with ``seed`` and cut into train/val/test by ``fractions``.

    Sizes are rounded for train and val; test receives the remainder, so the three parts are
    disjoint and exhaustive.
    """
    if len(fractions) != 3 or any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
        raise DatasetError(f"fractions must be three non-negative numbers summing to 1, got {fractions}")
    n = len(dataset)
    order = Rng(seed).child("split").permutation(n)
    n_train = min(n, round(fractions[0] * n))
    n_val = min(n - n_train, round(fractions[1] * n))
    return DatasetSplits(
        train=dataset.take(order[:n_train], Split.TRAIN),
        val=dataset.take(order[n_train : n_train + n_val], Split.VAL),
        test=dataset.take(order[n_train + n_val :], Split.TEST),
    )


def subsample_indices(n: int, k: int, seed: int) -> np.ndarray:
    if not 0 <= k <= n:
        raise DatasetError(f"cannot subsample {k} items from a pool of {n}")
    return np.sort(Rng(seed).child("subsample").permutation(n)[:k])


def subsample(dataset: Dataset, k: int, seed: int) -> Dataset:
    """The first ``k`` items of a seeded shuffle, kept in original order.

    Prefixes nest (``subsample(d, 100) ⊂ subsample(d, 500)``) and ``k = len(d)`` returns the
    dataset in its original order.
    """
    return dataset.take(subsample_indices(len(dataset), k, seed))
