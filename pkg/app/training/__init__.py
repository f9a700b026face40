"""Optimizers, the training loop and multi-run experiment drivers."""

from app.training.experiments import replicate_seeds, run_payload, run_request, scaling_study, sweep
from app.training.loop import TrainResult, evaluate, train
from app.training.optim import SGD, Adam, Optimizer, make_optimizer
from app.training.penalties import l1_penalty, l2_penalty, penalty

__all__ = [
    "Adam",
    "Optimizer",
    "SGD",
    "TrainResult",
    "evaluate",
    "l1_penalty",
    "l2_penalty",
    "make_optimizer",
    "penalty",
    "replicate_seeds",
    "run_payload",
    "run_request",
    "scaling_study",
    "sweep",
    "train",
]
