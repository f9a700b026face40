"""Reverse-mode automatic differentiation on dense float64 tensors."""

from app.autodiff import ops
from app.autodiff.gradcheck import gradcheck
from app.autodiff.rng import Rng
from app.autodiff.tensor import Tape, Tensor, as_tensor, backward, current_tape

__all__ = [
    "Rng",
    "Tape",
    "Tensor",
    "as_tensor",
    "backward",
    "current_tape",
    "gradcheck",
    "ops",
]
