"""Central-difference gradient checking."""

import logging
from collections.abc import Callable

import numpy as np

from app.autodiff.rng import Rng
from app.autodiff.tensor import Tape, Tensor

logger = logging.getLogger(__name__)

ScalarFn = Callable[[Tensor], Tensor]


def _value(f: ScalarFn, point: np.ndarray) -> float:
    return f(Tensor(point)).item()


def _signature(f: ScalarFn, point: np.ndarray) -> tuple[bytes, ...]:
    with Tape() as tape:
        f(Tensor(point, requires_grad=True))
    return tape.kink_signature()


def gradcheck(
    f: ScalarFn,
    point: Tensor | np.ndarray,
    step: float = 1e-5,
    *,
    max_coords: int | None = None,
    rng: Rng | None = None,
    kink_margin: float = 10.0,
) -> float:
    """Max over coordinates of |analytic - central difference| / max(1, |analytic|).

    Coordinates whose perturbation by ``kink_margin * step`` changes the activation pattern of a
    relu or maxpool node are skipped, so non-smooth points never enter the comparison.
    ``max_coords`` checks a random subset of coordinates drawn from ``rng``.
    """
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")

    base = np.array(point.data if isinstance(point, Tensor) else point, dtype=np.float64)
    with Tape() as tape:
        x = Tensor(base, requires_grad=True)
        out = f(x)
        if out.size != 1:
            raise ValueError(f"gradcheck needs a scalar function, got shape {out.shape}")
        if out.tape is tape:
            tape.backward(out)
    analytic = x.grad if x.grad is not None else np.zeros_like(base)
    reference = tape.kink_signature()

    coords = np.arange(base.size)
    if max_coords is not None and max_coords < base.size:
        chooser = rng if rng is not None else Rng(0)
        coords = np.sort(chooser.permutation(base.size)[:max_coords])

    worst = 0.0
    skipped = 0
    for c in coords:
        if reference:
            near_kink = False
            for sign in (1.0, -1.0):
                shifted = base.copy()
                shifted.flat[c] += sign * kink_margin * step
                if _signature(f, shifted) != reference:
                    near_kink = True
                    break
            if near_kink:
                skipped += 1
                continue
        plus, minus = base.copy(), base.copy()
        plus.flat[c] += step
        minus.flat[c] -= step
        numeric = (_value(f, plus) - _value(f, minus)) / (2.0 * step)
        a = analytic.flat[c]
        worst = max(worst, abs(a - numeric) / max(1.0, abs(a)))

    if skipped:
        logger.debug("gradcheck skipped %d of %d coordinates near kinks", skipped, len(coords))
    return worst
