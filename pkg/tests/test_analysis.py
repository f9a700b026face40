import numpy as np
import pytest

from app.analysis import (
    LandscapeGrid,
    central_window_mean,
    dataset_loss,
    log_log_slope,
    metadata,
    scan_landscape,
    sharpness,
    verify_first_order,
)
from app.analysis.landscape import directions, scan_landscape_files
from app.attacks import clean_pass
from app.autodiff import Rng
from app.config import load_experiment_config
from app.data import load_source
from app.errors import DegenerateModelError
from app.models import INPUT, Batch, build
from app.schemas.experiment import LandscapeSettings, TheorySettings
from app.schemas.model import ModelSpec
from app.utils.storage import save_checkpoint

EPSILONS = [1e-4, 1e-3, 1e-2, 1e-1]


def theory(p=0.7, targets=None) -> TheorySettings:
    return TheorySettings(epsilons=EPSILONS, p_x=p, p_theta=p, targets=targets)


def test_quadratic_gap_closed_form(quadratic):
    # L = 1/2 (theta x - y)^2 at theta=1, x=1, y=0: both gradients are 1, so each branch
    # is 1/2 (1 + eps)^2 and the gap is eps^2 exactly.
    quadratic.params.assign("theta", np.array([1.0]))
    batch = Batch(np.array([[1.0]]), np.array([[0.0]]))
    report = verify_first_order(quadratic, batch, theory(p=1.0), Rng(0), epsilons=[1e-3, 5e-3])
    assert report.clean_loss == 0.5
    assert report.rows[1].gap == pytest.approx(2.5e-5, abs=1e-12)
    assert report.slope == pytest.approx(2.0, abs=1e-3)


def test_input_only_gap_on_quadratic(quadratic):
    # theta=1, x=2, y=0: L = 2, g_x = 2; the input branch is 1/2 (2 + eps)^2 while the weight
    # branch has no targets and stays at L, so the gap is eps^2 / 2.
    quadratic.params.assign("theta", np.array([1.0]))
    batch = Batch(np.array([[2.0]]), np.array([[0.0]]))
    report = verify_first_order(quadratic, batch, theory(p=1.0, targets=[INPUT]), Rng(0), epsilons=[0.01])
    (row,) = report.rows
    assert report.clean_loss == 2.0
    assert row.surrogate == pytest.approx(4.02, rel=1e-12)
    assert row.adversarial == pytest.approx(4.02005, rel=1e-12)
    assert row.gap == pytest.approx(5e-5, rel=1e-6)


def test_zero_masks_give_zero_gap(mlp, moons_batch):
    report = verify_first_order(mlp, moons_batch, theory(p=0.0), Rng(0))
    assert all(row.gap == 0.0 for row in report.rows)
    assert report.slope is None


def test_full_input_mask_penalty_is_eps_times_gradient_norm(mlp, moons_batch):
    g = clean_pass(mlp, moons_batch).input_grad
    report = verify_first_order(mlp, moons_batch, theory(p=1.0, targets=[INPUT]), Rng(0))
    for row in report.rows:
        expected = row.epsilon * np.linalg.norm(g)
        assert row.penalty_mask_norm == pytest.approx(expected, rel=1e-12)
        assert row.surrogate - 2 * report.clean_loss == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_gap_is_second_order_on_random_mlps(seed, moons_splits):
    spec = ModelSpec(arch="mlp", layer_sizes=[2, 16, 2], input_shape=[2], activation="tanh", seed=seed)
    network = build(spec)
    batch = moons_splits.train.batch(np.arange(32))
    report = verify_first_order(network, batch, theory(), Rng(seed))
    assert 1.8 <= report.slope <= 2.2


def test_vanishing_gradients_are_degenerate(quadratic):
    quadratic.params.assign("theta", np.array([0.0]))
    batch = Batch(np.array([[1.0], [2.0]]), np.array([[0.0], [0.0]]))
    with pytest.raises(DegenerateModelError):
        verify_first_order(quadratic, batch, theory(), Rng(0))


def test_log_log_slope():
    assert log_log_slope([1.0, 10.0, 100.0], [2.0, 200.0, 20000.0]) == pytest.approx(2.0)
    assert log_log_slope([1.0, 10.0], [0.0, 1.0]) is None


SMALL = LandscapeSettings(resolution=5, span=1.0, seed=3, center_window=3)


def test_single_cell_grid_is_checkpoint_loss(mlp, moons_splits):
    grid = scan_landscape(mlp, moons_splits.test, LandscapeSettings(resolution=1, center_window=1))
    assert grid.losses.shape == (1, 1)
    assert grid.center_loss == dataset_loss(mlp, moons_splits.test)


def test_center_equals_direct_loss_and_params_untouched(mlp, moons_splits):
    before = mlp.params.arrays()
    grid = scan_landscape(mlp, moons_splits.test, SMALL)
    assert abs(grid.center_loss - dataset_loss(mlp, moons_splits.test)) <= 1e-12
    for name, values in before.items():
        np.testing.assert_array_equal(mlp.params[name].data, values)
    assert grid.deltas[2] == 0.0 and grid.etas[2] == 0.0


def test_directions_are_normalized_per_tensor(mlp):
    alpha, beta = directions(mlp.params, seed=3)
    for name, tensor in mlp.params.items():
        assert np.linalg.norm(alpha[name]) == pytest.approx(np.linalg.norm(tensor.data), rel=1e-10)
        assert not np.array_equal(alpha[name], beta[name])


def test_scan_is_pure_and_swap_transposes(mlp, moons_splits):
    a = scan_landscape(mlp, moons_splits.test, SMALL)
    b = scan_landscape(mlp, moons_splits.test, SMALL)
    np.testing.assert_array_equal(a.losses, b.losses)
    swapped = scan_landscape(mlp, moons_splits.test, SMALL, swap_directions=True)
    np.testing.assert_array_equal(swapped.losses, a.losses.T)


def test_row_parallel_scan_matches_inline(tmp_path, mlp, moons_config):
    config_path = moons_config()
    save_checkpoint(tmp_path / "ckpt.json", mlp)
    dataset = load_source(load_experiment_config(config_path).data).test
    inline = scan_landscape(mlp, dataset, SMALL)
    by_rows = scan_landscape_files(str(tmp_path / "ckpt.json"), str(config_path), SMALL, workers=1)
    np.testing.assert_array_equal(by_rows.losses, inline.losses)


def _grid(losses) -> LandscapeGrid:
    losses = np.asarray(losses, dtype=np.float64)
    axis = np.linspace(-1, 1, losses.shape[0])
    flagged = [tuple(int(v) for v in ij) for ij in np.argwhere(~np.isfinite(losses))]
    return LandscapeGrid(axis, axis.copy(), losses, flagged)


def test_sharpness_of_constant_grid_is_zero():
    assert sharpness(_grid(np.full((5, 5), 0.7))) == 0.0


def test_sharpness_of_paraboloid():
    axis = np.array([-1.0, 0.0, 1.0])
    losses = axis[:, None] ** 2 + axis[None, :] ** 2
    # excesses: four 1s, four 2s, one 0
    assert sharpness(_grid(losses)) == pytest.approx(12 / 9)


def test_flagged_cells_are_excluded():
    losses = np.full((3, 3), 1.0)
    losses[1, 1] = 0.0
    losses[0, 0] = np.nan
    grid = _grid(losses)
    assert grid.flagged == [(0, 0)]
    assert sharpness(grid) == pytest.approx(7 / 8)
    assert central_window_mean(grid, 3) == pytest.approx(7 / 8)


def test_metadata_records_directions(mlp, moons_splits):
    grid = scan_landscape(mlp, moons_splits.test, SMALL)
    info = metadata(grid, SMALL, "abc")
    assert info.alpha_seed[0] == 3 and info.alpha_seed != info.beta_seed
    assert info.normalization == "per_tensor"
    assert info.center_loss == grid.center_loss
