"""Numerical check that the masked adversarial objective equals its gradient-penalty surrogate to first order.

For a fixed mask and ``r = eps * g / ||g||`` per target, a first-order expansion gives

    L(x + M_x r_x) + L(theta + M_theta r_theta) = 2L + sum_t eps <g_t, M_t g_t> / ||g_t|| + O(eps^2)

so the gap between the two sides must shrink quadratically in eps. The report also carries the
displayed penalty ``eps * ||M g||``, which equals the exact first-order term for all-ones or
all-zeros masks.
"""

import logging

import numpy as np

from app.attacks.perturb import ZERO_GRAD_NORM, clean_pass, fgm, resolve_targets, sample_mask
from app.autodiff import Rng, Tensor
from app.errors import DegenerateModelError
from app.models.network import INPUT, Batch, Network
from app.schemas.analysis import EquivalenceReport, EquivalenceRow
from app.schemas.experiment import TheorySettings

logger = logging.getLogger(__name__)


def _first_order_term(g: np.ndarray, mask: np.ndarray, eps: float) -> float:
    norm = float(np.linalg.norm(g))
    if norm <= ZERO_GRAD_NORM:
        return 0.0
    return eps * float(np.sum(g * mask * g)) / norm


def log_log_slope(epsilons: list[float], gaps: list[float]) -> float | None:
    """Least-squares slope of log(gap) on log(eps) over positive gaps; None with fewer than two."""
    points = [(e, gap) for e, gap in zip(epsilons, gaps) if gap > 0]
    if len(points) < 2:
        return None
    x, y = np.log(np.asarray(points)).T
    return float(np.polyfit(x, y, 1)[0])


def verify_first_order(
    network: Network,
    batch: Batch,
    settings: TheorySettings,
    rng: Rng,
    epsilons: list[float] | None = None,
) -> EquivalenceReport:
    """Gap between the masked adversarial objective and its first-order surrogate per eps.

    Masks are drawn once from ``rng`` and shared by every eps; ``eps_x = eps_theta = eps``.
    """
    epsilons = list(epsilons if epsilons is not None else settings.epsilons)
    if any(e <= 0 for e in epsilons) or any(b <= a for a, b in zip(epsilons, epsilons[1:])):
        raise ValueError("epsilons must be positive and strictly increasing")

    targets = resolve_targets(network, settings.targets)
    weights = [name for name in targets if name != INPUT]
    clean = clean_pass(network, batch)
    g = {name: clean.grads[name] for name in weights}
    if INPUT in targets:
        g[INPUT] = clean.input_grad
    if all(np.linalg.norm(v) <= ZERO_GRAD_NORM for v in g.values()):
        raise DegenerateModelError("all attacked gradients vanish; the surrogate is trivially exact")

    mask = sample_mask({name: network.params[name].shape for name in weights}, settings.p_theta, rng.child("theta"))
    if INPUT in targets:
        mask = mask.merged(sample_mask({INPUT: clean.input_grad.shape}, settings.p_x, rng.child("x")))

    rows = []
    for eps in epsilons:
        r = {name: mask.apply(name, fgm(v, eps)) for name, v in g.items()}
        x_branch = network.loss(batch, overlays={INPUT: Tensor(r[INPUT])} if INPUT in r else {}).item()
        theta_branch = network.loss(batch, overlays={name: Tensor(r[name]) for name in weights}).item()
        adversarial = x_branch + theta_branch
        surrogate = 2 * clean.loss + sum(_first_order_term(v, mask[name], eps) for name, v in g.items())
        penalty = sum(eps * float(np.linalg.norm(mask[name] * v)) for name, v in g.items())
        rows.append(
            EquivalenceRow(
                epsilon=eps,
                gap=abs(adversarial - surrogate),
                surrogate=surrogate,
                adversarial=adversarial,
                penalty_mask_norm=penalty,
            )
        )

    slope = log_log_slope(epsilons, [row.gap for row in rows])
    logger.info("first-order check over %d eps values: slope=%s", len(rows), slope)
    return EquivalenceReport(rows=rows, slope=slope, clean_loss=clean.loss)
