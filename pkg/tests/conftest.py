"""Shared fixtures: tiny models, tiny datasets and config files on disk."""

from pathlib import Path

import numpy as np
import pytest

from app.config import get_settings
from app.data import load_source
from app.models import Batch, build
from app.schemas.data import TwoMoonsSource
from app.schemas.model import ModelSpec

ATTACK_TOML = """
[train.regularizer]
kind = "attack"

[train.regularizer.attack]
method = "{method}"
eps_x = {eps}
eps_theta = {eps}
p_x = {p}
p_theta = {p}
{extra}
"""


def _moons_toml(
    *,
    regularizer: str = 'kind = "none"',
    attack: dict | None = None,
    epochs: int = 2,
    n: int = 120,
    init: str = "",
    extra: str = "",
    seeds: tuple[int, ...] = (0,),
) -> str:
    """A small two-moons MLP experiment; ``attack`` replaces the regularizer section."""
    text = f"""
schema_version = 1
seeds = {list(seeds)}
{extra}

[model]
arch = "mlp"
layer_sizes = [2, 8, 2]
input_shape = [2]
{init}

[data]
kind = "two_moons"
n = {n}
noise = 0.2
fractions = [0.6, 0.2, 0.2]

[train]
epochs = {epochs}
batch_size = 16
learning_rate = 0.01
"""
    if attack is None:
        text += f"\n[train.regularizer]\n{regularizer}\n"
    else:
        k = attack.get("k")
        text += ATTACK_TOML.format(
            method=attack["method"], eps=attack["eps"], p=attack["p"], extra=f"k = {k}" if k else ""
        )
    return text


@pytest.fixture
def write_config(tmp_path):
    def write(text: str, name: str = "experiment.toml") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write


@pytest.fixture
def mlp_spec() -> ModelSpec:
    return ModelSpec(arch="mlp", layer_sizes=[2, 8, 2], input_shape=[2], num_classes=2)


@pytest.fixture
def mlp(mlp_spec):
    return build(mlp_spec)


@pytest.fixture
def moons_splits():
    return load_source(TwoMoonsSource(n=120, noise=0.2, fractions=(0.6, 0.2, 0.2)))


@pytest.fixture
def moons_batch(moons_splits) -> Batch:
    return moons_splits.train.batch(np.arange(16))


@pytest.fixture
def quadratic():
    return build(ModelSpec(arch="quadratic", layer_sizes=[1], input_shape=[1]))


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
    """Settings are cached per process; tests always see the defaults."""
    monkeypatch.delenv("DROPATTACK_REDIS_URL", raising=False)
    monkeypatch.delenv("DROPATTACK_WORKERS", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def moons_config(write_config):
    """Write a small two-moons experiment config; keyword arguments tweak its sections."""

    def make(name: str = "experiment.toml", **sections) -> Path:
        return write_config(_moons_toml(**sections), name)

    return make
