"""The training loop shared by standard, regularized and adversarial training."""

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from app.attacks import adversarial_gradient
from app.attacks.perturb import PASS_COST
from app.autodiff import Rng, Tape, backward, ops
from app.data.dataset import Dataset, DatasetSplits
from app.errors import DatasetError, NonFiniteError, TrainingAborted
from app.models.network import Batch, Network
from app.models.params import ParameterSet
from app.schemas.train import DropoutRegularizer, MetricsRecord, TrainConfig
from app.training.optim import make_optimizer
from app.training.penalties import penalty

logger = logging.getLogger(__name__)

EVAL_CHUNK = 512


@dataclass
class TrainResult:
    """Parameters of the best-validation epoch, the metrics trail and the test accuracy."""

    params: ParameterSet
    metrics: list[MetricsRecord] = field(default_factory=list)
    test_accuracy: float | None = None
    best_epoch: int = 0
    fb_count: int = 0


def evaluate(network: Network, dataset: Dataset) -> tuple[float, float]:
    """Mean cross-entropy and accuracy over a whole split (eval mode)."""
    if len(dataset) == 0:
        raise DatasetError(f"cannot evaluate on an empty {dataset.split.value} split")
    total_loss = 0.0
    correct = 0
    for start in range(0, len(dataset), EVAL_CHUNK):
        batch = dataset.batch(np.arange(start, min(start + EVAL_CHUNK, len(dataset))))
        logits = network.forward(batch.inputs)
        total_loss += ops.softmax_cross_entropy(logits, batch.labels).item() * len(batch)
        correct += int((logits.data.argmax(axis=1) == batch.labels).sum())
    return total_loss / len(dataset), correct / len(dataset)


def _standard_step(network: Network, batch: Batch, cfg: TrainConfig, rng: Rng) -> tuple[float, dict[str, np.ndarray]]:
    rate = cfg.regularizer.rate if isinstance(cfg.regularizer, DropoutRegularizer) else 0.0
    network.params.zero_grad()
    with Tape():
        loss = network.loss(batch, training=True, dropout=rate, rng=rng)
        extra = penalty(network.params, cfg.regularizer)
        objective = loss if extra is None else ops.add(loss, extra)
        backward(objective)
    return loss.item(), network.params.grads()


def _checked_evaluate(network: Network, dataset: Dataset, epoch: int, batch: int) -> tuple[float, float]:
    try:
        return evaluate(network, dataset)
    except NonFiniteError as exc:
        raise TrainingAborted(epoch, batch, network.params.norms(), f"evaluating {dataset.split.value}: {exc}") from exc


def train(network: Network, splits: DatasetSplits, cfg: TrainConfig, *, record_wall_time: bool = False) -> TrainResult:
    """Train ``network`` in place and return the best-validation parameters.

    Batch order, dropout masks and attack masks all derive from ``cfg.seed`` through named
    child streams, so two runs with the same config produce identical metrics. With
    ``record_wall_time`` off the ``seconds`` field is 0.0.
    """
    if len(splits.train) == 0:
        raise DatasetError("training split is empty")
    selection = splits.val if len(splits.val) else splits.train
    rng = Rng(cfg.seed)
    optimizer = make_optimizer(cfg.optimizer, cfg.learning_rate)
    attack = cfg.attack

    result = TrainResult(params=network.params.copy())
    best_acc = -1.0
    stale = 0
    started = time.perf_counter()

    epoch = last_batch = 0
    for epoch in range(1, cfg.epochs + 1):
        order = rng.child("shuffle", epoch).permutation(len(splits.train))
        for index, batch in enumerate(splits.train.batches(order, cfg.batch_size)):
            try:
                if attack is not None:
                    outcome = adversarial_gradient(network, batch, attack, rng.child("attack", epoch, index))
                    loss, grads = outcome.clean_loss, outcome.update
                    result.fb_count += outcome.fb_count
                else:
                    loss, grads = _standard_step(network, batch, cfg, rng.child("dropout", epoch, index))
                    result.fb_count += PASS_COST
                if not all(np.all(np.isfinite(g)) for g in grads.values()):
                    raise NonFiniteError("gradient")
                optimizer.step(network.params, grads)
            except NonFiniteError as exc:
                raise TrainingAborted(epoch, index, network.params.norms(), str(exc)) from exc
            last_batch = index

        if epoch % cfg.eval_every and epoch != cfg.epochs:
            continue
        train_loss, train_acc = _checked_evaluate(network, splits.train, epoch, last_batch)
        val_loss, val_acc = _checked_evaluate(network, selection, epoch, last_batch)
        seconds = time.perf_counter() - started if record_wall_time else 0.0
        result.metrics.append(
            MetricsRecord(
                epoch=epoch,
                train_loss=train_loss,
                train_acc=train_acc,
                val_loss=val_loss,
                val_acc=val_acc,
                seconds=seconds,
                fb_count=result.fb_count,
            )
        )
        logger.info(
            "epoch %d: train_loss=%.4f train_acc=%.4f val_loss=%.4f val_acc=%.4f fb=%d",
            epoch, train_loss, train_acc, val_loss, val_acc, result.fb_count,
        )
        if val_acc > best_acc:
            best_acc = val_acc
            result.best_epoch = epoch
            result.params = network.params.copy()
            stale = 0
        else:
            stale += 1
            if cfg.patience is not None and stale >= cfg.patience:
                logger.info("early stop at epoch %d (best epoch %d)", epoch, result.best_epoch)
                break

    for name, values in result.params.arrays().items():
        network.params.assign(name, values)
    if len(splits.test):
        result.test_accuracy = _checked_evaluate(network, splits.test, epoch, last_batch)[1]
    return result
