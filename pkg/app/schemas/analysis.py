"""Analysis report schemas."""

from pydantic import BaseModel, Field


class EquivalenceRow(BaseModel):
    """Adversarial objective vs first-order surrogate at one epsilon."""

    epsilon: float
    gap: float = Field(ge=0)
    surrogate: float
    adversarial: float
    penalty_mask_norm: float


class EquivalenceReport(BaseModel):
    """Gap between the adversarial objective and its gradient-penalty surrogate over an eps grid.

    ``slope`` is the least-squares slope of log(gap) against log(eps) over rows with a positive
    gap; ``None`` when fewer than two such rows exist (e.g. all-zero masks).
    """

    rows: list[EquivalenceRow]
    slope: float | None
    clean_loss: float


class LandscapeMetadata(BaseModel):
    """Companion metadata of a landscape CSV."""

    checkpoint_id: str
    seed: int
    alpha_seed: list[int]
    beta_seed: list[int]
    normalization: str = "per_tensor"
    split: str
    resolution: int
    span: float
    center_loss: float
    sharpness: float
    central_window_mean: float
    flagged_cells: list[tuple[int, int]] = []
