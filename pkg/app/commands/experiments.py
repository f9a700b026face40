"""`sweep` and `scaling`: multi-run experiment tables."""

import argparse
from pathlib import Path

from app.commands.common import CommandOutcome, add_config, add_out, add_seed, add_workers, out_dir, seeds_for
from app.config import load_experiment_config, load_sweep_grid
from app.schemas.run import RunKind
from app.training import replicate_seeds, scaling_study, sweep
from app.utils.storage import SCALING_COLUMNS, SWEEP_COLUMNS, write_records


def _sizes(value: str) -> list[int]:
    try:
        sizes = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {value!r}") from None
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError(f"sizes must be positive, got {value!r}")
    return sizes


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="grid over epsilon, p and K")
    add_config(parser)
    parser.add_argument("--grid", required=True, help="grid file (TOML)")
    add_seed(parser)
    add_workers(parser)
    add_out(parser)
    parser.set_defaults(handler=run_sweep)

    parser = subparsers.add_parser("scaling", help="standard vs DropAttack over training-set sizes")
    add_config(parser)
    parser.add_argument("--sizes", required=True, type=_sizes, help="comma-separated sizes, e.g. 100,500,1000")
    add_seed(parser)
    add_workers(parser)
    add_out(parser)
    parser.set_defaults(handler=run_scaling)


def run_sweep(args: argparse.Namespace) -> CommandOutcome:
    config_path = Path(args.config)
    config = load_experiment_config(config_path)
    grid = load_sweep_grid(args.grid)
    base_seeds = seeds_for(args, config)
    seeds = base_seeds if args.seed is not None else replicate_seeds(base_seeds, grid.replicates)
    outcome = CommandOutcome(RunKind.SWEEP, out_dir(args, RunKind.SWEEP, config), seeds=seeds, config_path=config_path)

    rows = sweep(grid, config, seeds, workers=args.workers)
    outcome.outputs.append(write_records(outcome.out_dir / "sweep.csv", SWEEP_COLUMNS, rows))
    outcome.metrics["cells"] = len(rows)
    outcome.metrics["grid"] = str(args.grid)
    best = max(rows, key=lambda row: row.mean_test_acc)
    outcome.metrics["best_cell"] = f"eps={best.epsilon} p={best.p} K={best.K}"
    outcome.metrics["best_mean_test_acc"] = best.mean_test_acc
    return outcome


def run_scaling(args: argparse.Namespace) -> CommandOutcome:
    config_path = Path(args.config)
    config = load_experiment_config(config_path)
    seeds = seeds_for(args, config)
    outcome = CommandOutcome(RunKind.SCALING, out_dir(args, RunKind.SCALING, config), seeds=seeds, config_path=config_path)

    rows = scaling_study(args.sizes, config, seeds, workers=args.workers, config_path=str(config_path))
    outcome.outputs.append(write_records(outcome.out_dir / "scaling.csv", SCALING_COLUMNS, rows))
    outcome.metrics["sizes"] = ",".join(str(s) for s in args.sizes)
    for row in rows:
        outcome.metrics[f"size_{row.size}.improvement"] = row.improvement
    return outcome
