"""`train`: one training run per seed, with metrics CSV and checkpoint."""

import argparse
import logging
from pathlib import Path

import numpy as np

from app.commands.common import CommandOutcome, add_config, add_out, add_seed, out_dir, seeds_for
from app.config import get_settings, load_experiment_config
from app.data import load_source
from app.errors import TrainingAborted
from app.models import build
from app.schemas.run import RunKind
from app.training import train
from app.utils.storage import METRICS_COLUMNS, save_checkpoint, write_records

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("train", help="train a model from an experiment config")
    add_config(parser)
    add_seed(parser)
    add_out(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> CommandOutcome:
    config_path = Path(args.config)
    config = load_experiment_config(config_path)
    seeds = seeds_for(args, config)
    outcome = CommandOutcome(RunKind.TRAIN, out_dir(args, RunKind.TRAIN, config), seeds=seeds, config_path=config_path)
    splits = load_source(config.data)
    record_wall_time = get_settings().record_wall_time

    accuracies = []
    for seed in seeds:
        target = outcome.out_dir if len(seeds) == 1 else outcome.out_dir / f"seed_{seed}"
        network = build(config.model.model_copy(update={"seed": seed}))
        cfg = config.train.model_copy(update={"seed": seed})
        try:
            result = train(network, splits, cfg, record_wall_time=record_wall_time)
        except TrainingAborted as exc:
            outcome.aborted = exc
            outcome.metrics[f"seed_{seed}.aborted_epoch"] = exc.epoch
            return outcome

        outcome.outputs.append(write_records(target / "metrics.csv", METRICS_COLUMNS, result.metrics))
        checkpoint_id = save_checkpoint(
            target / "checkpoint.json",
            network,
            {"seed": seed, "best_epoch": result.best_epoch, "test_accuracy": result.test_accuracy},
        )
        outcome.outputs.append(target / "checkpoint.json")
        outcome.metrics[f"seed_{seed}.test_accuracy"] = result.test_accuracy
        outcome.metrics[f"seed_{seed}.checkpoint_id"] = checkpoint_id
        outcome.metrics[f"seed_{seed}.fb_count"] = result.fb_count
        if result.test_accuracy is not None:
            accuracies.append(result.test_accuracy)
        logger.info("seed %d: test_accuracy=%s best_epoch=%d", seed, result.test_accuracy, result.best_epoch)

    if accuracies:
        outcome.metrics["mean_test_accuracy"] = float(np.mean(accuracies))
    return outcome
