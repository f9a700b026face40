"""Shared plumbing for CLI sub-commands."""

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from app.config import get_settings
from app.errors import TrainingAborted
from app.schemas.experiment import ExperimentConfig
from app.schemas.run import RunKind


@dataclass
class CommandOutcome:
    """What a command reports back for its run manifest."""

    kind: RunKind
    out_dir: Path
    outputs: list[Path] = field(default_factory=list)
    metrics: dict[str, float | int | str | None] = field(default_factory=dict)
    seeds: list[int] = field(default_factory=list)
    config_path: Path | None = None
    failed: bool = False
    aborted: TrainingAborted | None = None
    manifest_name: str = "manifest.json"


def out_dir(args: argparse.Namespace, kind: RunKind, config: ExperimentConfig | None = None) -> Path:
    """``--out``, else the config's ``out_dir``, else ``<output_root>/<command>``."""
    if getattr(args, "out", None):
        path = Path(args.out)
    elif config is not None and config.out_dir is not None:
        path = config.out_dir
    else:
        path = get_settings().output_root / kind.value
    path.mkdir(parents=True, exist_ok=True)
    return path


def non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def seeds_for(args: argparse.Namespace, config: ExperimentConfig) -> list[int]:
    return [args.seed] if getattr(args, "seed", None) is not None else list(config.seeds)


def add_config(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--config", required=required, help="experiment config (TOML)")


def add_out(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="output directory")


def add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=non_negative_int, help="override the config's seed list with one seed")


def add_workers(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--workers", type=positive_int, help="process pool size (default: DROPATTACK_WORKERS)")
