"""Dataset ingestion, synthetic generators and splitting."""

from app.data.csv_io import load_csv_dataset, write_csv_dataset
from app.data.dataset import Dataset, DatasetSplits
from app.data.idx import load_mnist_idx, write_idx
from app.data.splits import split, subsample
from app.data.synthetic import gen_text_synthetic, gen_two_moons
from app.schemas.data import (
    CsvSource,
    DataSource,
    MnistIdxSource,
    Split,
    TextSyntheticSource,
    TwoMoonsSource,
)


def load_source(source: DataSource, *, subsample_size: int | None = None, subsample_seed: int | None = None) -> DatasetSplits:
    """Materialize the train/val/test splits described by a config ``[data]`` section.

    ``subsample_size`` (or the source's own ``subsample``) trims the training split to a nested
    subset drawn with ``subsample_seed`` (default: the split seed).
    """
    match source:
        case MnistIdxSource():
            pool = load_mnist_idx(source.train_images, source.train_labels)
            parts = split(pool, source.fractions, source.split_seed)
            test = load_mnist_idx(source.test_images, source.test_labels)
            parts = DatasetSplits(parts.train, parts.val, test.take(slice(None), Split.TEST))
        case TwoMoonsSource():
            parts = split(gen_two_moons(source.n, source.noise, source.seed), source.fractions, source.split_seed)
        case TextSyntheticSource():
            full = gen_text_synthetic(source.vocab, source.length, source.n, source.rule, source.seed)
            parts = split(full, source.fractions, source.split_seed)
        case CsvSource():
            parts = split(load_csv_dataset(source.path, source.num_classes), source.fractions, source.split_seed)
    size = subsample_size if subsample_size is not None else source.subsample
    if size is not None:
        seed = subsample_seed if subsample_seed is not None else source.split_seed
        parts = DatasetSplits(subsample(parts.train, size, seed), parts.val, parts.test)
    return parts


__all__ = [
    "Dataset",
    "DatasetSplits",
    "gen_text_synthetic",
    "gen_two_moons",
    "load_csv_dataset",
    "load_mnist_idx",
    "load_source",
    "split",
    "subsample",
    "write_csv_dataset",
    "write_idx",
]
