"""Multi-run drivers: hyperparameter sweeps and training-set scaling studies."""

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from app.data import load_source
from app.errors import ConfigError, DatasetError
from app.models import build
from app.schemas.attack import AttackConfig, AttackMethod
from app.schemas.experiment import ExperimentConfig, SweepGrid
from app.schemas.run import RunRequest, RunSummary
from app.schemas.train import AttackRegularizer, NoRegularizer, ScalingRow, SweepRow, TrainConfig
from app.training.loop import train
from app.workers.pool import dispatch

logger = logging.getLogger(__name__)

TRAIN_TASK = "train:run"


def run_request(request: RunRequest) -> RunSummary:
    """Build, train and score one model; the run seed drives initialization and training."""
    splits = load_source(request.data, subsample_size=request.subsample, subsample_seed=request.seed)
    network = build(request.model.model_copy(update={"seed": request.seed}))
    cfg = request.train.model_copy(update={"seed": request.seed})
    result = train(network, splits, cfg)
    return RunSummary(
        seed=request.seed,
        test_accuracy=result.test_accuracy,
        best_epoch=result.best_epoch,
        fb_count=result.fb_count,
        final_val_acc=result.metrics[-1].val_acc if result.metrics else None,
    )


def run_payload(payload: dict) -> dict:
    """JSON-in/JSON-out wrapper used by the process pool and the Celery task."""
    return run_request(RunRequest.model_validate(payload)).model_dump(mode="json")


def replicate_seeds(seeds: list[int], count: int) -> list[int]:
    """The first ``count`` seeds, extended with consecutive integers when too few are listed."""
    chosen = list(seeds[:count])
    while len(chosen) < count:
        chosen.append(max(chosen, default=-1) + 1)
    return chosen


def _with_regularizer(base: ExperimentConfig, train_cfg: TrainConfig, seed: int, subsample: int | None = None) -> dict:
    request = RunRequest(model=base.model, data=base.data, train=train_cfg, seed=seed, subsample=subsample)
    return request.model_dump(mode="json")


def _accuracies(summaries: list[dict]) -> np.ndarray:
    values = [s["test_accuracy"] for s in summaries]
    if any(v is None for v in values):
        raise DatasetError("sweep runs need a non-empty test split")
    return np.asarray(values, dtype=np.float64)


@dataclass(frozen=True)
class Cell:
    epsilon: float
    p: float
    k: int

    def attack(self, targets: list[str] | None) -> AttackConfig:
        return AttackConfig(
            method=AttackMethod.DROPATTACK if self.k == 1 else AttackMethod.DROPATTACK_K,
            eps_x=self.epsilon,
            eps_theta=self.epsilon,
            p_x=self.p,
            p_theta=self.p,
            k=self.k,
            targets=targets,
        )


def sweep(grid: SweepGrid, base: ExperimentConfig, seeds: list[int], *, workers: int | None = None) -> list[SweepRow]:
    """One row per (epsilon, p, K) cell with mean and sample std of test accuracy over seeds."""
    targets = base.attack.targets if base.attack is not None else None
    cells = [Cell(e, p, k) for e, p, k in itertools.product(grid.epsilon, grid.p, grid.k)]
    payloads = [
        _with_regularizer(base, base.train.model_copy(update={"regularizer": AttackRegularizer(attack=cell.attack(targets))}), seed)
        for cell in cells
        for seed in seeds
    ]
    summaries = dispatch(run_payload, payloads, task_name=TRAIN_TASK, workers=workers)

    rows = []
    for index, cell in enumerate(cells):
        acc = _accuracies(summaries[index * len(seeds) : (index + 1) * len(seeds)])
        rows.append(
            SweepRow(
                epsilon=cell.epsilon,
                p=cell.p,
                K=cell.k,
                seed_count=len(seeds),
                mean_test_acc=float(acc.mean()),
                std_test_acc=float(acc.std(ddof=1)) if len(acc) > 1 else 0.0,
            )
        )
        logger.info("cell eps=%g p=%g K=%d: mean_test_acc=%.4f", cell.epsilon, cell.p, cell.k, rows[-1].mean_test_acc)
    return rows


def scaling_study(
    sizes: list[int],
    base: ExperimentConfig,
    seeds: list[int],
    *,
    attack: AttackConfig | None = None,
    workers: int | None = None,
    config_path: str | None = None,
) -> list[ScalingRow]:
    """Paired standard vs DropAttack test accuracy at each training-set size.

    Each seed subsamples its own nested training subset, shared by both variants. The attack
    comes from the call or from the config; there is no fallback.
    """
    pool = len(load_source(base.data).train)
    too_big = [size for size in sizes if size > pool]
    if too_big:
        raise DatasetError(f"sizes {too_big} exceed the training pool of {pool}")
    attack = attack or base.attack
    if attack is None:
        raise ConfigError(
            config_path or "<experiment>",
            "the scaling study needs an attack; set kind = \"attack\" with explicit eps, p and K",
            field="train.regularizer",
        )

    standard = base.train.model_copy(update={"regularizer": NoRegularizer()})
    adversarial = base.train.model_copy(update={"regularizer": AttackRegularizer(attack=attack)})
    payloads = [
        _with_regularizer(base, variant, seed, size)
        for size in sizes
        for variant in (standard, adversarial)
        for seed in seeds
    ]
    summaries = dispatch(run_payload, payloads, task_name=TRAIN_TASK, workers=workers)

    rows = []
    stride = len(seeds)
    for index, size in enumerate(sizes):
        offset = 2 * index * stride
        standard_acc = float(_accuracies(summaries[offset : offset + stride]).mean())
        attack_acc = float(_accuracies(summaries[offset + stride : offset + 2 * stride]).mean())
        rows.append(
            ScalingRow(size=size, standard_acc=standard_acc, dropattack_acc=attack_acc, improvement=attack_acc - standard_acc)
        )
        logger.info("size %d: standard=%.4f dropattack=%.4f", size, standard_acc, attack_acc)
    return rows
