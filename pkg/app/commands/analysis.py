"""`landscape`, `verify-theory` and `gradcheck`."""

import argparse
import logging
from pathlib import Path

from app.analysis import gradcheck_suite, metadata, scan_landscape, verify_first_order
from app.analysis.gradients import DEFAULT_SEEDS, TOLERANCE
from app.analysis.landscape import scan_landscape_files
from app.autodiff import Rng
from app.commands.common import (
    CommandOutcome,
    add_config,
    add_out,
    add_seed,
    add_workers,
    out_dir,
    positive_int,
    seeds_for,
)
from app.config import get_settings, load_experiment_config
from app.data import load_source
from app.models import build
from app.schemas.experiment import LandscapeSettings, TheorySettings
from app.schemas.run import RunKind
from app.utils.storage import EQUIVALENCE_COLUMNS, LANDSCAPE_COLUMNS, load_checkpoint, write_csv, write_json, write_records

logger = logging.getLogger(__name__)

SLOPE_RANGE = (1.8, 2.2)


def register(subparsers) -> None:
    parser = subparsers.add_parser("landscape", help="2-D loss landscape around a checkpoint")
    parser.add_argument("--checkpoint", required=True, help="checkpoint written by `train`")
    add_config(parser)
    parser.add_argument("--swap", action="store_true", help="swap the two directions (transposes the grid)")
    add_workers(parser)
    add_out(parser)
    parser.set_defaults(handler=run_landscape)

    parser = subparsers.add_parser("verify-theory", help="first-order gradient-penalty equivalence check")
    add_config(parser)
    parser.add_argument("--checkpoint", help="evaluate a trained checkpoint instead of a fresh model")
    add_seed(parser)
    add_out(parser)
    parser.set_defaults(handler=run_verify_theory)

    parser = subparsers.add_parser("gradcheck", help="finite-difference check of every op and architecture")
    parser.add_argument("--seeds", type=positive_int, default=DEFAULT_SEEDS, help="random seeds per check")
    parser.add_argument("--step", type=float, default=1e-5, help="central-difference step")
    add_out(parser)
    parser.set_defaults(handler=run_gradcheck)


def run_landscape(args: argparse.Namespace) -> CommandOutcome:
    config_path = Path(args.config)
    config = load_experiment_config(config_path)
    settings = config.landscape or LandscapeSettings()
    network, checkpoint_id = load_checkpoint(args.checkpoint)
    outcome = CommandOutcome(
        RunKind.LANDSCAPE, out_dir(args, RunKind.LANDSCAPE, config), seeds=[settings.seed], config_path=config_path
    )

    workers = args.workers if args.workers is not None else get_settings().workers
    if workers > 1 or get_settings().redis_url:
        grid = scan_landscape_files(
            str(Path(args.checkpoint).resolve()), str(config_path.resolve()), settings,
            swap_directions=args.swap, workers=workers,
        )
    else:
        dataset = load_source(config.data).get(settings.split)
        grid = scan_landscape(network, dataset, settings, swap_directions=args.swap)

    info = metadata(grid, settings, checkpoint_id)
    outcome.outputs.append(write_csv(outcome.out_dir / "landscape.csv", LANDSCAPE_COLUMNS, grid.rows()))
    outcome.outputs.append(write_json(outcome.out_dir / "landscape.json", info))
    outcome.metrics |= {
        "checkpoint_id": checkpoint_id,
        "center_loss": info.center_loss,
        "sharpness": info.sharpness,
        "central_window_mean": info.central_window_mean,
        "flagged_cells": len(info.flagged_cells),
    }
    return outcome


def run_verify_theory(args: argparse.Namespace) -> CommandOutcome:
    config_path = Path(args.config)
    config = load_experiment_config(config_path)
    settings = config.theory or TheorySettings()
    seed = seeds_for(args, config)[0]
    outcome = CommandOutcome(
        RunKind.VERIFY_THEORY, out_dir(args, RunKind.VERIFY_THEORY, config), seeds=[seed], config_path=config_path
    )

    if args.checkpoint:
        network, checkpoint_id = load_checkpoint(args.checkpoint)
        outcome.metrics["checkpoint_id"] = checkpoint_id
    else:
        network = build(config.model.model_copy(update={"seed": seed}))
    train_split = load_source(config.data).train
    batch = train_split.batch(slice(0, settings.batch_size))
    report = verify_first_order(network, batch, settings, Rng(seed).child("theory"))

    outcome.outputs.append(write_records(outcome.out_dir / "equivalence.csv", EQUIVALENCE_COLUMNS, report.rows))
    outcome.outputs.append(write_json(outcome.out_dir / "equivalence.json", report))
    outcome.metrics["slope"] = report.slope
    outcome.metrics["clean_loss"] = report.clean_loss
    low, high = SLOPE_RANGE
    if report.slope is None or not low <= report.slope <= high:
        logger.warning("gap slope %s outside [%s, %s]", report.slope, low, high)
    else:
        logger.info("gap slope %.3f: gap is second order in eps", report.slope)
    return outcome


def run_gradcheck(args: argparse.Namespace) -> CommandOutcome:
    outcome = CommandOutcome(RunKind.GRADCHECK, out_dir(args, RunKind.GRADCHECK), seeds=list(range(args.seeds)))
    table = gradcheck_suite(args.seeds, args.step)
    rows = [(name, error, error < TOLERANCE) for name, error in table.items()]
    outcome.outputs.append(write_csv(outcome.out_dir / "gradcheck.csv", ["check", "max_rel_error", "passed"], rows))
    outcome.metrics["worst"] = max(table.values())
    outcome.metrics["failing"] = sum(not passed for *_, passed in rows)
    outcome.failed = outcome.metrics["failing"] > 0
    for name, error, passed in rows:
        print(f"{name:32s} {error:.3e} {'ok' if passed else 'FAIL'}")
    return outcome
