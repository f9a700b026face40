"""Finite-difference checks of every op and every architecture."""

import logging
from collections.abc import Callable

import numpy as np

from app.autodiff import Rng, Tensor, gradcheck, ops
from app.models import build
from app.models.network import INPUT, Batch, Network
from app.schemas.model import ModelSpec

logger = logging.getLogger(__name__)

TOLERANCE = 1e-4
DEFAULT_SEEDS = 20
COORDS_PER_TENSOR = 12

Case = Callable[[Rng], tuple[Callable[[Tensor], Tensor], np.ndarray]]


def _away_from_zero(values: np.ndarray) -> np.ndarray:
    return np.sign(values) * (0.1 + np.abs(values))


def _contract(rng: Rng, shape: tuple[int, ...]) -> Callable[[Tensor], Tensor]:
    """Reduce an op output to a scalar with fixed random weights."""
    weights = rng.child("weights").normal(shape)
    return lambda out: ops.sum_(ops.mul(out, weights))


def _unary(op, shape=(3, 4), positive_margin=False) -> Case:
    def case(rng: Rng):
        x = rng.child("x").normal(shape)
        if positive_margin:
            x = _away_from_zero(x)
        sample = op(Tensor(x))
        reduce = _contract(rng, sample.shape)
        return (lambda t: reduce(op(t))), x

    return case


def _binary(op, a_shape, b_shape, wrt: int) -> Case:
    def case(rng: Rng):
        a = rng.child("a").normal(a_shape)
        b = rng.child("b").normal(b_shape)
        reduce = _contract(rng, op(Tensor(a), Tensor(b)).shape)
        if wrt == 0:
            return (lambda t: reduce(op(t, Tensor(b)))), a
        return (lambda t: reduce(op(Tensor(a), t))), b

    return case


def _dropout_case(rng: Rng):
    x = rng.child("x").normal((4, 5))
    reduce = _contract(rng, x.shape)
    # a fresh stream per call so every evaluation sees the same mask
    return (lambda t: reduce(ops.dropout(t, 0.3, Rng(rng.seed, rng.key).child("drop"), True))), x


def _cross_entropy_case(rng: Rng):
    logits = rng.child("logits").normal((5, 4))
    labels = rng.child("labels").integers(0, 4, (5,))
    return (lambda t: ops.softmax_cross_entropy(t, labels)), logits


def _embed_case(rng: Rng):
    table = rng.child("table").normal((7, 3))
    idx = rng.child("idx").integers(0, 7, (2, 4))
    reduce = _contract(rng, (2, 4, 3))
    return (lambda t: reduce(ops.embed_lookup(t, idx))), table


def _getitem_case(rng: Rng):
    x = rng.child("x").normal((4, 5, 3))
    reduce = _contract(rng, (4, 3))
    return (lambda t: reduce(t[:, 2, :])), x


OP_CASES: dict[str, Case] = {
    "add[a]": _binary(ops.add, (3, 4), (4,), 0),
    "add[b]": _binary(ops.add, (3, 4), (4,), 1),
    "sub[a]": _binary(ops.sub, (3, 4), (3, 4), 0),
    "sub[b]": _binary(ops.sub, (3, 4), (1, 4), 1),
    "mul[a]": _binary(ops.mul, (3, 4), (3, 4), 0),
    "mul[b]": _binary(ops.mul, (3, 4), (3, 1), 1),
    "matmul[a]": _binary(ops.matmul, (3, 4), (4, 2), 0),
    "matmul[b]": _binary(ops.matmul, (3, 4), (4, 2), 1),
    "conv2d[input]": _binary(ops.conv2d, (2, 2, 7, 7), (3, 2, 3, 3), 0),
    "conv2d[kernel]": _binary(ops.conv2d, (2, 2, 7, 7), (3, 2, 3, 3), 1),
    "neg": _unary(ops.neg),
    "abs": _unary(ops.abs_, positive_margin=True),
    "sum": _unary(ops.sum_),
    "mean": _unary(ops.mean),
    "reshape": _unary(lambda t: ops.reshape(t, (2, 6))),
    "flatten": _unary(ops.flatten, shape=(2, 3, 2)),
    "getitem": _getitem_case,
    "relu": _unary(ops.relu),
    "tanh": _unary(ops.tanh),
    "sigmoid": _unary(ops.sigmoid),
    "maxpool2d": _unary(lambda t: ops.maxpool2d(t, 2), shape=(2, 2, 6, 6)),
    "embed_lookup": _embed_case,
    "dropout": _dropout_case,
    "softmax_cross_entropy": _cross_entropy_case,
}

ARCH_SPECS: dict[str, ModelSpec] = {
    "mlp": ModelSpec(arch="mlp", layer_sizes=[3, 5, 3], input_shape=[3], num_classes=3),
    "cnn_lenet_lite": ModelSpec(arch="cnn_lenet_lite", layer_sizes=[2, 3, 6], input_shape=[1, 16, 16], num_classes=3),
    "rnn_text": ModelSpec(arch="rnn_text", layer_sizes=[3, 4], input_shape=[5], vocab_size=9, num_classes=2),
    "quadratic": ModelSpec(arch="quadratic", layer_sizes=[1], input_shape=[1]),
}


def _arch_batch(network: Network, rng: Rng) -> Batch:
    spec = network.spec
    match spec.arch:
        case "rnn_text":
            return Batch(rng.integers(0, spec.vocab_size, (3, *spec.input_shape)), rng.integers(0, spec.num_classes, (3,)))
        case "quadratic":
            return Batch(rng.normal((4, 1)), rng.normal((4, 1)))
    return Batch(rng.normal((3, *spec.input_shape)), rng.integers(0, spec.num_classes, (3,)))


def check_op(name: str, seeds: int = DEFAULT_SEEDS, step: float = 1e-5) -> float:
    worst = 0.0
    for seed in range(seeds):
        rng = Rng(seed).child("op", name)
        f, point = OP_CASES[name](rng)
        worst = max(worst, gradcheck(f, point, step))
    return worst


def check_architecture(arch: str, seeds: int = DEFAULT_SEEDS, step: float = 1e-5) -> float:
    """Gradients of the loss w.r.t. each parameter tensor and the input overlay."""
    worst = 0.0
    for seed in range(seeds):
        rng = Rng(seed).child("arch", arch)
        network = build(ARCH_SPECS[arch].model_copy(update={"seed": seed}))
        batch = _arch_batch(network, rng.child("batch"))
        targets = {INPUT: network.input_overlay_shape(batch.inputs)} | {n: t.shape for n, t in network.params.items()}
        for target, shape in targets.items():

            def loss(t: Tensor, target=target) -> Tensor:
                return network.loss(batch, overlays={target: t})

            error = gradcheck(loss, np.zeros(shape), step, max_coords=COORDS_PER_TENSOR, rng=rng.child("coords", target))
            worst = max(worst, error)
    return worst


def gradcheck_suite(seeds: int = DEFAULT_SEEDS, step: float = 1e-5) -> dict[str, float]:
    """Max relative error per op and per architecture."""
    table = {f"op:{name}": check_op(name, seeds, step) for name in OP_CASES}
    table |= {f"arch:{arch}": check_architecture(arch, seeds, step) for arch in ARCH_SPECS}
    failing = [name for name, error in table.items() if error >= TOLERANCE]
    if failing:
        logger.warning("gradcheck above %.0e: %s", TOLERANCE, failing)
    return table
