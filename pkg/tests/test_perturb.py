import numpy as np
import pytest

from app.attacks import (
    AttackMask,
    clean_pass,
    dropattack_k,
    dropattack_step,
    fgm,
    fgm_gradient,
    fgsm,
    pgd_gradient,
    pgd_step,
    resolve_targets,
    sample_mask,
)
from app.autodiff import Rng
from app.errors import AttackConfigError, UnknownTargetError
from app.models import INPUT, Batch
from app.schemas.attack import AttackConfig, AttackMethod


def dropattack(eps=1.0, p=0.7, k=None, targets=None):
    method = AttackMethod.DROPATTACK if k is None else AttackMethod.DROPATTACK_K
    return AttackConfig(method=method, eps_x=eps, eps_theta=eps, p_x=p, p_theta=p, k=k, targets=targets)


def test_fgsm_example():
    np.testing.assert_array_equal(fgsm(np.array([0.2, -0.7, 0.0]), 0.1), [0.1, -0.1, 0.0])


def test_fgm_example_and_zero_gradient():
    np.testing.assert_allclose(fgm(np.array([3.0, 4.0]), 5.0), [3.0, 4.0])
    np.testing.assert_array_equal(fgm(np.zeros(3), 2.0), np.zeros(3))
    np.testing.assert_array_equal(fgm(np.array([1e-13, 0.0]), 2.0), np.zeros(2))


def test_fgm_norm_is_eps():
    rng = Rng(11)
    for _ in range(1000):
        g = rng.normal((7,), scale=float(10 ** rng.uniform(-6, 6, ())))
        eps = float(rng.uniform(0.0, 10.0, ()))
        assert np.linalg.norm(fgm(g, eps)) == pytest.approx(eps, rel=1e-9, abs=1e-12)


def test_negative_eps_is_rejected():
    with pytest.raises(AttackConfigError):
        fgm(np.ones(2), -1.0)
    with pytest.raises(AttackConfigError):
        fgsm(np.ones(2), -0.1)


def test_pgd_step_examples():
    np.testing.assert_allclose(pgd_step(np.zeros(2), np.array([1.0, 0.0]), 0.5, np.zeros(2), 1.0), [0.5, 0.0])
    np.testing.assert_allclose(pgd_step(np.array([0.8, 0.0]), np.array([1.0, 0.0]), 0.5, np.zeros(2), 1.0), [1.0, 0.0])


def test_pgd_trajectories_stay_in_ball():
    rng = Rng(2)
    for _ in range(100):
        x0 = rng.normal((5,))
        x = x0.copy()
        for _ in range(10):
            x = pgd_step(x, rng.normal((5,)), 0.3, x0, 0.5)
            assert np.linalg.norm(x - x0) <= 0.5 + 1e-12


@pytest.mark.parametrize("p", [0.1, 0.5, 0.7, 0.9])
def test_mask_frequency(p):
    mask = sample_mask({"w": (1000, 1000)}, p, Rng(0))
    assert abs(mask["w"].mean() - p) < 0.002


def test_mask_extremes_and_idempotence():
    zeros = sample_mask({"w": (50,)}, 0.0, Rng(1))
    ones = sample_mask({"w": (50,)}, 1.0, Rng(1))
    assert zeros["w"].sum() == 0 and ones["w"].sum() == 50
    mask = sample_mask({"w": (50,)}, 0.5, Rng(1))
    r = np.arange(50.0)
    np.testing.assert_array_equal(mask.apply("w", mask.apply("w", r)), mask.apply("w", r))
    with pytest.raises(AttackConfigError):
        sample_mask({"w": (2,)}, 1.5, Rng(0))


def test_masks_differ_per_target():
    mask = sample_mask({"a": (200,), "b": (200,)}, 0.5, Rng(0))
    assert isinstance(mask, AttackMask)
    assert not np.array_equal(mask["a"], mask["b"])


def test_resolve_targets(mlp):
    assert resolve_targets(mlp, None) == [INPUT, "fc1.w", "fc2.w"]
    assert resolve_targets(mlp, ["fc1.b"]) == ["fc1.b"]
    with pytest.raises(UnknownTargetError, match="fc3.w"):
        resolve_targets(mlp, ["fc3.w"])
    with pytest.raises(AttackConfigError, match="no attack targets"):
        resolve_targets(mlp, [])


def test_method_requires_explicit_hyperparameters():
    with pytest.raises(ValueError, match="eps_theta"):
        AttackConfig(method="dropattack", eps_x=1.0, p_x=0.5, p_theta=0.5)
    with pytest.raises(ValueError, match="targets"):
        dropattack(targets=[])


PARTIAL_TARGETS = [None, ["fc1.w", "fc2.w"], [INPUT]]


@pytest.mark.parametrize("targets", PARTIAL_TARGETS)
def test_p_zero_update_is_three_times_clean_gradient(mlp, moons_batch, targets):
    clean = clean_pass(mlp, moons_batch)
    outcome = dropattack_step(mlp, moons_batch, dropattack(eps=5.0, p=0.0, targets=targets), Rng(0))
    for name, g in clean.grads.items():
        np.testing.assert_allclose(outcome.grads[name], 2 * g, rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(outcome.update[name], 3 * g, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("targets", PARTIAL_TARGETS)
def test_p_zero_trajectory_matches_sgd_at_triple_rate(mlp, moons_splits, targets):
    lr = 0.05
    reference = mlp.with_params(mlp.params.copy())
    for step in range(10):
        batch = moons_splits.train.batch(np.arange(step * 4, step * 4 + 4))
        outcome = dropattack_step(mlp, batch, dropattack(eps=3.0, p=0.0, targets=targets), Rng(0).child(step))
        for name, tensor in list(mlp.params.items()):
            mlp.params.assign(name, tensor.data - lr * outcome.update[name])
        clean = clean_pass(reference, batch)
        for name, tensor in list(reference.params.items()):
            reference.params.assign(name, tensor.data - 3 * lr * clean.grads[name])
    for name in mlp.params:
        np.testing.assert_allclose(mlp.params[name].data, reference.params[name].data, rtol=0, atol=1e-10)


def test_input_only_full_mask_branch_equals_fgm(mlp, moons_batch):
    eps = 0.5
    ours = dropattack_step(mlp, moons_batch, dropattack(eps=eps, p=1.0, targets=[INPUT]), Rng(3))
    baseline = fgm_gradient(mlp, moons_batch, AttackConfig(method="fgm", eps_x=eps))
    clean = clean_pass(mlp, moons_batch)
    for name in mlp.params:
        # the weight branch has no targets, so it is the clean loss
        expected = baseline.grads[name] + clean.grads[name]
        np.testing.assert_array_equal(ours.grads[name], expected)
        np.testing.assert_array_equal(ours.update[name], clean.grads[name] + expected)


def test_single_step_k_equals_dropattack_step(mlp, moons_batch):
    one = dropattack_step(mlp, moons_batch, dropattack(eps=2.0, p=0.7), Rng(9))
    k1 = dropattack_k(mlp, moons_batch, dropattack(eps=2.0, p=0.7, k=1), Rng(9))
    for name in mlp.params:
        np.testing.assert_allclose(k1.update[name], one.update[name], rtol=0, atol=1e-12)


def test_masks_are_fixed_across_steps(mlp, moons_batch):
    outcome = dropattack_k(mlp, moons_batch, dropattack(eps=2.0, p=0.5, k=3), Rng(4))
    assert len(outcome.masks) == 3
    for later in outcome.masks[1:]:
        for name in outcome.masks[0].masks:
            np.testing.assert_array_equal(later[name], outcome.masks[0][name])
    # the perturbation itself moves between steps
    assert not np.array_equal(outcome.perturbations[0].r["fc1.w"], outcome.perturbations[2].r["fc1.w"])


def test_masked_perturbations_respect_eps(mlp, moons_batch):
    outcome = dropattack_k(mlp, moons_batch, dropattack(eps=0.3, p=0.7, k=2), Rng(4))
    for perturbation in outcome.perturbations:
        for name in perturbation.r:
            assert np.linalg.norm(perturbation.masked(name)) <= 0.3 + 1e-12


def test_same_seed_same_outcome(mlp, moons_batch):
    a = dropattack_k(mlp, moons_batch, dropattack(eps=1.0, p=0.7, k=2), Rng(8))
    b = dropattack_k(mlp, moons_batch, dropattack(eps=1.0, p=0.7, k=2), Rng(8))
    for name in mlp.params:
        np.testing.assert_array_equal(a.update[name], b.update[name])


@pytest.mark.parametrize("targets", PARTIAL_TARGETS)
def test_dropattack_forward_backward_counts(mlp, moons_batch, targets):
    assert dropattack_step(mlp, moons_batch, dropattack(targets=targets), Rng(0)).fb_count == 4
    assert dropattack_k(mlp, moons_batch, dropattack(k=3, targets=targets), Rng(0)).fb_count == 8


def test_forward_backward_counts(mlp, moons_batch):
    assert fgm_gradient(mlp, moons_batch, AttackConfig(method="fgm", eps_x=1.0)).fb_count == 4
    pgd = AttackConfig(method="pgd", pgd_radius=1.0, pgd_step=0.3, k=3)
    assert pgd_gradient(mlp, moons_batch, pgd).fb_count == 8


def test_attack_leaves_parameters_untouched(mlp, moons_batch):
    before = mlp.params.arrays()
    dropattack_k(mlp, moons_batch, dropattack(eps=5.0, p=0.7, k=3), Rng(0))
    for name, values in before.items():
        np.testing.assert_array_equal(mlp.params[name].data, values)


# Closed-form oracle on L(theta, x) = 1/2 mean((theta x - y)^2).


def _dtheta(theta, x, y):
    return np.array([np.mean((theta * x - y) * x)])


def _dx(theta, x, y):
    return (theta * x - y) * theta / len(x)


def _unit(g, eps):
    norm = np.linalg.norm(g)
    return np.zeros_like(g) if norm <= 1e-12 else eps * g / norm


def _oracle(theta, x, y, m_theta, m_x, eps, k):
    g_theta = _dtheta(theta, x, y)
    g_x = _dx(theta, x, y)
    clean = g_theta.copy()
    acc = np.zeros_like(g_theta)
    for _ in range(k):
        x_adv = x + m_x * _unit(g_x, eps)
        theta_adv = theta + m_theta * _unit(g_theta, eps)
        acc = acc + (_dtheta(theta, x_adv, y) + _dtheta(theta_adv, x, y)) / k
        g_x = g_x + _dx(theta, x_adv, y) / k
        g_theta = g_theta + _dtheta(theta_adv, x, y) / k
    return clean + acc


@pytest.mark.parametrize("k", [1, 3])
@pytest.mark.parametrize("p", [1.0, 0.7])
def test_quadratic_matches_closed_form_oracle(quadratic, k, p):
    quadratic.params.set_attackable(["theta"])
    quadratic.params.assign("theta", np.array([0.8]))
    x = np.array([[1.0], [-2.0], [0.5], [3.0]])
    y = np.array([[0.3], [1.0], [-0.4], [2.0]])
    batch = Batch(x, y)
    cfg = dropattack(eps=0.25, p=p, k=None if k == 1 else k)
    engine = dropattack_step if k == 1 else dropattack_k
    outcome = engine(quadratic, batch, cfg, Rng(6))

    mask = outcome.masks[0]
    expected = _oracle(np.array([0.8]), x, y, mask["theta"], mask[INPUT], 0.25, k)
    np.testing.assert_allclose(outcome.update["theta"], expected, rtol=1e-12, atol=1e-14)
