"""Adversarial perturbations and adversarial-training gradients."""

from app.attacks.perturb import (
    AttackMask,
    AttackOutcome,
    CleanPass,
    Perturbation,
    adversarial_gradient,
    clean_pass,
    dropattack_k,
    dropattack_step,
    fgm,
    fgm_gradient,
    fgsm,
    fgsm_gradient,
    pgd_gradient,
    pgd_step,
    resolve_targets,
    sample_mask,
)

__all__ = [
    "AttackMask",
    "AttackOutcome",
    "CleanPass",
    "Perturbation",
    "adversarial_gradient",
    "clean_pass",
    "dropattack_k",
    "dropattack_step",
    "fgm",
    "fgm_gradient",
    "fgsm",
    "fgsm_gradient",
    "pgd_gradient",
    "pgd_step",
    "resolve_targets",
    "sample_mask",
]
