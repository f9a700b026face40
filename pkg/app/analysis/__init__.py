"""First-order theory checks, gradient checks and loss-landscape scans."""

from app.analysis.gradients import gradcheck_suite
from app.analysis.landscape import (
    LandscapeGrid,
    central_window_mean,
    dataset_loss,
    metadata,
    scan_landscape,
    sharpness,
)
from app.analysis.theory import log_log_slope, verify_first_order

__all__ = [
    "LandscapeGrid",
    "central_window_mean",
    "dataset_loss",
    "gradcheck_suite",
    "log_log_slope",
    "metadata",
    "scan_landscape",
    "sharpness",
    "verify_first_order",
]
