"""2-D loss-landscape scans around a trained checkpoint.

The loss is evaluated at ``theta* + delta * alpha + eta * beta`` for two random Gaussian
directions, each rescaled tensor by tensor to the norm of the matching checkpoint tensor.
Offsets are passed as forward overlays, so the checkpoint parameters are never modified.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from app.autodiff import Rng, Tensor
from app.config import load_experiment_config
from app.data import load_source
from app.data.dataset import Dataset
from app.errors import NonFiniteError
from app.models.network import Network
from app.models.params import ParameterSet
from app.schemas.analysis import LandscapeMetadata
from app.schemas.experiment import LandscapeSettings
from app.utils.storage import load_checkpoint
from app.workers.pool import dispatch

logger = logging.getLogger(__name__)

NORMALIZATION = "per_tensor"
EVAL_CHUNK = 512


@dataclass(frozen=True)
class LandscapeGrid:
    """Loss matrix ``losses[i, j] = L(deltas[i], etas[j])``; NaN marks flagged cells."""

    deltas: np.ndarray
    etas: np.ndarray
    losses: np.ndarray
    flagged: list[tuple[int, int]] = field(default_factory=list)
    alpha_key: tuple[int, ...] = ()
    beta_key: tuple[int, ...] = ()
    normalization: str = NORMALIZATION

    @property
    def center(self) -> tuple[int, int]:
        return len(self.deltas) // 2, len(self.etas) // 2

    @property
    def center_loss(self) -> float:
        return float(self.losses[self.center])

    def rows(self) -> list[tuple[float, float, float]]:
        """Row-major ``(delta, eta, loss)`` triples."""
        return [
            (float(d), float(e), float(self.losses[i, j]))
            for i, d in enumerate(self.deltas)
            for j, e in enumerate(self.etas)
        ]


def axis(settings: LandscapeSettings) -> np.ndarray:
    values = np.linspace(-settings.span, settings.span, settings.resolution)
    values[settings.resolution // 2] = 0.0
    return values


def direction(params: ParameterSet, rng: Rng) -> dict[str, np.ndarray]:
    """Gaussian direction with each tensor rescaled to the norm of the matching parameter."""
    out = {}
    for name, tensor in params.items():
        d = rng.child(name).normal(tensor.shape)
        norm = np.linalg.norm(d)
        out[name] = d * (np.linalg.norm(tensor.data) / norm) if norm > 0 else np.zeros_like(d)
    return out


def dataset_loss(network: Network, dataset: Dataset, overlays: Mapping[str, Tensor] | None = None) -> float:
    """Mean cross-entropy over the whole dataset, in chunks."""
    total = 0.0
    for start in range(0, len(dataset), EVAL_CHUNK):
        batch = dataset.batch(np.arange(start, min(start + EVAL_CHUNK, len(dataset))))
        total += network.loss(batch, overlays=overlays).item() * len(batch)
    return total / len(dataset)


def _cell(network: Network, dataset: Dataset, first: dict, second: dict, d: float, e: float) -> float:
    overlays = {name: Tensor(d * first[name] + e * second[name]) for name in first}
    try:
        return dataset_loss(network, dataset, overlays)
    except NonFiniteError:
        return float("nan")


def landscape_row(
    network: Network,
    dataset: Dataset,
    settings: LandscapeSettings,
    row: int,
    *,
    swap_directions: bool = False,
    pair: tuple[dict, dict] | None = None,
) -> list[float]:
    """Losses of one grid row; directions are derived from ``settings.seed`` unless given."""
    alpha, beta = pair if pair is not None else directions(network.params, settings.seed)
    first, second = (beta, alpha) if swap_directions else (alpha, beta)
    values = axis(settings)
    return [_cell(network, dataset, first, second, values[row], e) for e in values]


def directions(params: ParameterSet, seed: int) -> tuple[dict[str, np.ndarray], dict[str, np.ndarray]]:
    rng = Rng(seed)
    return direction(params, rng.child("alpha")), direction(params, rng.child("beta"))


def assemble(settings: LandscapeSettings, rows: list[list[float]]) -> LandscapeGrid:
    losses = np.asarray(rows, dtype=np.float64)
    flagged = [(int(i), int(j)) for i, j in np.argwhere(~np.isfinite(losses))]
    rng = Rng(settings.seed)
    values = axis(settings)
    return LandscapeGrid(values, values.copy(), losses, flagged, rng.child("alpha").key, rng.child("beta").key)


def scan_landscape(
    network: Network,
    dataset: Dataset,
    settings: LandscapeSettings,
    *,
    swap_directions: bool = False,
) -> LandscapeGrid:
    """Evaluate the loss over the full grid; re-running with the same seed is bit-identical."""
    pair = directions(network.params, settings.seed)
    rows = []
    for row in range(settings.resolution):
        rows.append(landscape_row(network, dataset, settings, row, swap_directions=swap_directions, pair=pair))
        logger.debug("landscape row %d/%d", row + 1, settings.resolution)
    grid = assemble(settings, rows)
    if grid.flagged:
        logger.warning("%d landscape cells produced non-finite loss", len(grid.flagged))
    return grid


def _finite(values: np.ndarray) -> np.ndarray:
    return values[np.isfinite(values)]


def sharpness(grid: LandscapeGrid) -> float:
    """Mean of ``max(L - L(0, 0), 0)`` over the grid, flagged cells excluded."""
    center = grid.center_loss
    if not np.isfinite(center):
        raise ValueError("grid center is flagged; sharpness is undefined")
    excess = _finite(grid.losses) - center
    return float(np.mean(np.maximum(excess, 0.0)))


def central_window_mean(grid: LandscapeGrid, window: int) -> float:
    """Mean loss over the ``window x window`` block centred on (0, 0), flagged cells excluded."""
    ci, cj = grid.center
    half = window // 2
    block = grid.losses[max(ci - half, 0) : ci + half + 1, max(cj - half, 0) : cj + half + 1]
    return float(np.mean(_finite(block)))


def metadata(grid: LandscapeGrid, settings: LandscapeSettings, checkpoint_id: str) -> LandscapeMetadata:
    return LandscapeMetadata(
        checkpoint_id=checkpoint_id,
        seed=settings.seed,
        alpha_seed=[settings.seed, *grid.alpha_key],
        beta_seed=[settings.seed, *grid.beta_key],
        normalization=grid.normalization,
        split=settings.split,
        resolution=settings.resolution,
        span=settings.span,
        center_loss=grid.center_loss,
        sharpness=sharpness(grid),
        central_window_mean=central_window_mean(grid, settings.center_window),
        flagged_cells=grid.flagged,
    )


def row_payload(payload: dict) -> dict:
    """One grid row from file references: ``checkpoint``, ``config``, ``row``, ``swap``."""
    network, _ = load_checkpoint(payload["checkpoint"])
    config = load_experiment_config(payload["config"])
    settings = LandscapeSettings.model_validate(payload["settings"])
    dataset = load_source(config.data).get(settings.split)
    losses = landscape_row(network, dataset, settings, payload["row"], swap_directions=payload.get("swap", False))
    return {"row": payload["row"], "losses": losses}


def scan_landscape_files(
    checkpoint: str,
    config: str,
    settings: LandscapeSettings,
    *,
    swap_directions: bool = False,
    workers: int | None = None,
) -> LandscapeGrid:
    """Row-parallel scan; each worker reloads the checkpoint and data from the given files."""
    payloads = [
        {"checkpoint": checkpoint, "config": config, "row": row, "swap": swap_directions, "settings": settings.model_dump()}
        for row in range(settings.resolution)
    ]
    results = dispatch(row_payload, payloads, task_name="landscape:row", workers=workers)
    return assemble(settings, [r["losses"] for r in sorted(results, key=lambda r: r["row"])])
