"""Perturbation generators, Bernoulli attack masks and the adversarial-gradient engines.

Every engine follows the same pattern: a clean forward/backward through a zero input overlay
yields the parameter gradients and the input gradient, perturbations are built from those
gradients, and adversarial losses are evaluated by passing the perturbations as overlays, so
stored parameters are never written to.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from app.autodiff import Rng, Tape, Tensor, backward, ops
from app.errors import AttackConfigError, UnknownTargetError
from app.models.network import INPUT, Batch, Network
from app.schemas.attack import AttackConfig, AttackMethod

logger = logging.getLogger(__name__)

# Gradients at or below this L2 norm give a zero perturbation.
ZERO_GRAD_NORM = 1e-12

# forward + backward for a single pass
PASS_COST = 2


def _array(value) -> np.ndarray:
    return value.data if isinstance(value, Tensor) else np.asarray(value, dtype=np.float64)


def _check_eps(eps: float) -> None:
    if eps < 0:
        raise AttackConfigError(f"perturbation coefficient must be non-negative, got {eps}")


def fgsm(grad, eps: float) -> np.ndarray:
    """``eps * sign(grad)`` with sign(0) = 0."""
    _check_eps(eps)
    return eps * np.sign(_array(grad))


def fgm(grad, eps: float) -> np.ndarray:
    """``eps * g / ||g||_2``; zero when ``||g||_2 <= 1e-12``."""
    _check_eps(eps)
    g = _array(grad)
    norm = float(np.linalg.norm(g))
    if norm <= ZERO_GRAD_NORM:
        return np.zeros_like(g)
    return eps * g / norm


def pgd_step(x_t, grad, alpha: float, x0, radius: float) -> np.ndarray:
    """One normalized ascent step followed by projection onto the L2 ball around ``x0``."""
    if alpha <= 0 or radius <= 0:
        raise AttackConfigError(f"pgd needs alpha > 0 and radius > 0, got alpha={alpha}, radius={radius}")
    x_t = _array(x_t)
    x0 = _array(x0)
    offset = x_t + fgm(grad, alpha) - x0
    norm = float(np.linalg.norm(offset))
    if norm > radius:
        offset = offset * (radius / norm)
    return x0 + offset


@dataclass(frozen=True)
class AttackMask:
    """Per-target 0/1 masks; 1 means the perturbation element is applied."""

    masks: dict[str, np.ndarray]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.masks[name]

    def __contains__(self, name: object) -> bool:
        return name in self.masks

    def apply(self, name: str, r: np.ndarray) -> np.ndarray:
        return self.masks[name] * r

    def merged(self, other: "AttackMask") -> "AttackMask":
        return AttackMask({**self.masks, **other.masks})

    def copy(self) -> "AttackMask":
        return AttackMask({name: m.copy() for name, m in self.masks.items()})


def sample_mask(shapes: Mapping[str, tuple[int, ...]], p: float, rng: Rng) -> AttackMask:
    """Independent Bernoulli(p) mask for each named shape, one child stream per name."""
    if not 0.0 <= p <= 1.0:
        raise AttackConfigError(f"attack probability must lie in [0, 1], got {p}")
    return AttackMask({name: rng.child("mask", name).bernoulli(p, tuple(shape)) for name, shape in shapes.items()})


@dataclass(frozen=True)
class Perturbation:
    """Unmasked perturbations ``r`` per target, the eps each was scaled to, and the mask applied."""

    r: dict[str, np.ndarray]
    eps: dict[str, float]
    mask: AttackMask | None = None

    def masked(self, name: str) -> np.ndarray:
        return self.r[name] if self.mask is None else self.mask.apply(name, self.r[name])


@dataclass(frozen=True)
class CleanPass:
    loss: float
    grads: dict[str, np.ndarray]
    input_grad: np.ndarray


@dataclass
class AttackOutcome:
    """Result of one adversarial-gradient computation on a batch.

    ``grads`` is the adversarial part alone; ``update`` is the full descent direction
    (clean gradient plus ``grads``) that the optimizer consumes.
    """

    grads: dict[str, np.ndarray]
    update: dict[str, np.ndarray]
    clean_loss: float
    fb_count: int
    masks: list[AttackMask] = field(default_factory=list)
    perturbations: list[Perturbation] = field(default_factory=list)


def resolve_targets(network: Network, targets: list[str] | None) -> list[str]:
    """``None`` selects the input plus every attackable parameter, in parameter order."""
    if targets is None:
        resolved = [INPUT, *(name for name in network.params if name in network.params.attackable)]
    else:
        for name in targets:
            if name != INPUT and name not in network.params:
                raise UnknownTargetError(f"unknown attack target {name!r}; known: {[INPUT, *network.params]}")
        resolved = list(dict.fromkeys(targets))
    if not resolved:
        raise AttackConfigError("no attack targets")
    return resolved


def _input_leaf(network: Network, batch: Batch, values: np.ndarray | None = None) -> Tensor:
    shape = network.input_overlay_shape(batch.inputs)
    return Tensor(np.zeros(shape) if values is None else values, requires_grad=True, name=INPUT)


def _leaf_grad(leaf: Tensor) -> np.ndarray:
    return leaf.grad if leaf.grad is not None else np.zeros_like(leaf.data)


def clean_pass(network: Network, batch: Batch) -> CleanPass:
    """Clean loss with gradients for every parameter and for the (embedded) input."""
    network.params.zero_grad()
    overlay = _input_leaf(network, batch)
    with Tape():
        loss = network.loss(batch, overlays={INPUT: overlay})
        backward(loss)
    return CleanPass(loss.item(), network.params.grads(), _leaf_grad(overlay))


def _combine(*maps: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
    out = {name: g.copy() for name, g in maps[0].items()}
    for extra in maps[1:]:
        for name, g in extra.items():
            out[name] = out[name] + g
    return out


def _dropattack(network: Network, batch: Batch, cfg: AttackConfig, rng: Rng, steps: int) -> AttackOutcome:
    if steps < 1:
        raise AttackConfigError(f"K must be >= 1, got {steps}")
    targets = resolve_targets(network, cfg.targets)
    weights = [name for name in targets if name != INPUT]
    attack_input = INPUT in targets
    logger.debug("dropattack K=%d targets=%s", steps, targets)

    clean = clean_pass(network, batch)
    g: dict[str, np.ndarray] = {name: clean.grads[name] for name in weights}
    eps: dict[str, float] = {name: cfg.eps_theta for name in weights}
    if attack_input:
        g[INPUT] = clean.input_grad
        eps[INPUT] = cfg.eps_x

    # sampled once per batch and held fixed across the K steps
    mask = sample_mask({name: network.params[name].shape for name in weights}, cfg.p_theta, rng.child("theta"))
    if attack_input:
        mask = mask.merged(sample_mask({INPUT: clean.input_grad.shape}, cfg.p_x, rng.child("x")))

    adversarial = {name: np.zeros_like(v) for name, v in clean.grads.items()}
    outcome = AttackOutcome(adversarial, {}, clean.loss, PASS_COST)
    for _ in range(steps):
        perturbation = Perturbation({name: fgm(g[name], eps[name]) for name in g}, eps, mask)
        x_overlays = {INPUT: _input_leaf(network, batch, perturbation.masked(INPUT))} if attack_input else {}
        theta_overlays = {name: Tensor(perturbation.masked(name), requires_grad=True, name=name) for name in weights}

        network.params.zero_grad()
        with Tape():
            terms = [network.loss(batch, overlays=overlays) for overlays in (x_overlays, theta_overlays) if overlays]
            loss = terms[0] if len(terms) == 1 else ops.add(*terms)
            backward(loss)
        outcome.fb_count += PASS_COST

        for name, grad in network.params.grads().items():
            adversarial[name] = adversarial[name] + grad / steps
        if len(terms) == 1:
            # the untargeted branch is L(theta, x), whose gradient the clean pass already holds
            for name, grad in clean.grads.items():
                adversarial[name] = adversarial[name] + grad / steps
        for name, leaf in (x_overlays | theta_overlays).items():
            g[name] = g[name] + _leaf_grad(leaf) / steps
        outcome.masks.append(mask.copy())
        outcome.perturbations.append(perturbation)

    outcome.update = _combine(clean.grads, adversarial)
    return outcome


def dropattack_step(network: Network, batch: Batch, cfg: AttackConfig, rng: Rng) -> AttackOutcome:
    """Single-step DropAttack.

    ``grads`` is the gradient w.r.t. the parameters of
    ``L(theta, x + M_x r_x) + L(theta + M_theta r_theta, x)`` with ``r = fgm(g, eps)`` per target,
    and ``update`` adds the clean gradient. A branch with no targets is unperturbed and
    contributes the clean gradient.
    """
    if cfg.method is not AttackMethod.DROPATTACK:
        raise AttackConfigError(f"dropattack_step needs method 'dropattack', got {cfg.method.value!r}")
    return _dropattack(network, batch, cfg, rng, steps=1)


def dropattack_k(network: Network, batch: Batch, cfg: AttackConfig, rng: Rng) -> AttackOutcome:
    """K-step DropAttack with masks fixed after the first step.

    At each step the adversarial losses are evaluated at the current masked perturbations,
    their parameter gradients are accumulated with weight 1/K, and each target gradient is
    moved by 1/K of its gradient at the perturbed point before the perturbation is rebuilt.
    """
    if cfg.k is None:
        raise AttackConfigError("dropattack_k needs K")
    return _dropattack(network, batch, cfg, rng, steps=cfg.k)


def _input_attack(network: Network, batch: Batch, clean: CleanPass, r_x: np.ndarray, fb_count: int) -> AttackOutcome:
    overlay = _input_leaf(network, batch, r_x)
    network.params.zero_grad()
    with Tape():
        loss = network.loss(batch, overlays={INPUT: overlay})
        backward(loss)
    adversarial = network.params.grads()
    return AttackOutcome(
        grads=adversarial,
        update=_combine(clean.grads, adversarial),
        clean_loss=clean.loss,
        fb_count=fb_count + PASS_COST,
        perturbations=[Perturbation({INPUT: r_x}, {INPUT: float(np.linalg.norm(r_x))})],
    )


def fgsm_gradient(network: Network, batch: Batch, cfg: AttackConfig, rng: Rng | None = None) -> AttackOutcome:
    """Adversarial training on the input with a sign perturbation."""
    clean = clean_pass(network, batch)
    return _input_attack(network, batch, clean, fgsm(clean.input_grad, cfg.eps_x), PASS_COST)


def fgm_gradient(network: Network, batch: Batch, cfg: AttackConfig, rng: Rng | None = None) -> AttackOutcome:
    """Adversarial training on the input with an L2-normalized perturbation."""
    clean = clean_pass(network, batch)
    return _input_attack(network, batch, clean, fgm(clean.input_grad, cfg.eps_x), PASS_COST)


def pgd_gradient(network: Network, batch: Batch, cfg: AttackConfig, rng: Rng | None = None) -> AttackOutcome:
    """K-step L2 PGD on the input; the first step reuses the clean input gradient."""
    clean = clean_pass(network, batch)
    origin = np.zeros_like(clean.input_grad)
    r = pgd_step(origin, clean.input_grad, cfg.pgd_step, origin, cfg.pgd_radius)
    fb_count = PASS_COST
    for _ in range(cfg.steps - 1):
        overlay = _input_leaf(network, batch, r)
        with Tape():
            loss = network.loss(batch, overlays={INPUT: overlay})
            backward(loss)
        fb_count += PASS_COST
        r = pgd_step(r, _leaf_grad(overlay), cfg.pgd_step, origin, cfg.pgd_radius)
    return _input_attack(network, batch, clean, r, fb_count)


ENGINES = {
    AttackMethod.FGSM: fgsm_gradient,
    AttackMethod.FGM: fgm_gradient,
    AttackMethod.PGD: pgd_gradient,
    AttackMethod.DROPATTACK: dropattack_step,
    AttackMethod.DROPATTACK_K: dropattack_k,
}


def adversarial_gradient(network: Network, batch: Batch, cfg: AttackConfig, rng: Rng) -> AttackOutcome:
    """Dispatch on ``cfg.method``."""
    return ENGINES[cfg.method](network, batch, cfg, rng)
