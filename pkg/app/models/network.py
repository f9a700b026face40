"""Network base class and the overlay mechanism used by every attack."""

from collections.abc import Mapping
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from app.autodiff import Rng, Tensor, ops
from app.errors import ShapeError, UnknownTargetError
from app.models.params import ParameterSet
from app.schemas.model import ModelSpec

# Reserved attack-target name for the model input (embedding output for text models).
INPUT = "input"


@dataclass(frozen=True)
class Batch:
    """A mini-batch: inputs (float features or integer token indices) and labels."""

    inputs: np.ndarray
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)


class Network:
    """A built model: its spec, its parameters and a forward function over them.

    ``overlays`` map a parameter name (or :data:`INPUT`) to a tensor that is added to that
    parameter for the duration of one forward pass. Stored parameters are never mutated, and
    because the sum is an ordinary recorded op, gradients reach both the parameter and, when it
    requires them, the overlay.
    """

    arch: ClassVar[str]

    def __init__(self, spec: ModelSpec, params: ParameterSet):
        self.spec = spec
        self.params = params

    def __repr__(self) -> str:
        return f"{type(self).__name__}(params={self.params.count()})"

    # subclasses implement these

    def _forward(self, w: Mapping[str, Tensor], x: Tensor, input_overlay: Tensor | None, training: bool, dropout: float, rng: Rng | None) -> Tensor:
        raise NotImplementedError

    def input_overlay_shape(self, inputs: np.ndarray) -> tuple[int, ...]:
        return tuple(inputs.shape)

    # shared machinery

    def _effective_weights(self, overlays: Mapping[str, Tensor]) -> dict[str, Tensor]:
        weights: dict[str, Tensor] = {}
        for name, param in self.params.items():
            overlay = overlays.get(name)
            weights[name] = param if overlay is None else ops.add(param, overlay)
        return weights

    def _check_overlays(self, overlays: Mapping[str, Tensor], inputs: np.ndarray) -> None:
        for name, overlay in overlays.items():
            if name == INPUT:
                expected = self.input_overlay_shape(inputs)
            elif name in self.params:
                expected = self.params[name].shape
            else:
                raise UnknownTargetError(f"overlay target {name!r} is neither {INPUT!r} nor a parameter")
            if tuple(overlay.shape) != tuple(expected):
                raise ShapeError(f"overlay[{name}]", tuple(expected), tuple(overlay.shape))

    def forward(
        self,
        inputs: np.ndarray,
        *,
        overlays: Mapping[str, Tensor] | None = None,
        training: bool = False,
        dropout: float = 0.0,
        rng: Rng | None = None,
    ) -> Tensor:
        """Logits for a batch of inputs."""
        overlays = dict(overlays or {})
        self._check_overlays(overlays, inputs)
        weights = self._effective_weights(overlays)
        return self._forward(weights, Tensor(inputs), overlays.get(INPUT), training, dropout, rng)

    def loss(
        self,
        batch: Batch,
        *,
        overlays: Mapping[str, Tensor] | None = None,
        training: bool = False,
        dropout: float = 0.0,
        rng: Rng | None = None,
    ) -> Tensor:
        logits = self.forward(batch.inputs, overlays=overlays, training=training, dropout=dropout, rng=rng)
        return ops.softmax_cross_entropy(logits, batch.labels)

    def predict(self, inputs: np.ndarray) -> np.ndarray:
        return self.forward(inputs).data.argmax(axis=1)

    def with_params(self, params: ParameterSet) -> "Network":
        return type(self)(self.spec, params)


def forward_with_overlay(network: Network, overlays: Mapping[str, Tensor], batch: Batch) -> Tensor:
    """Logits computed as if each named parameter were ``value + overlay``."""
    return network.forward(batch.inputs, overlays=overlays)
