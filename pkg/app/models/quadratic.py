"""Scalar closed-form toy: L(theta, x, y) = 1/2 (theta * x - y)^2, averaged over the batch.

Used as an oracle: every gradient and perturbation it produces can be written down by hand.
Inputs are ``(batch, 1)`` floats and labels ``(batch, 1)`` float targets.
"""

from app.autodiff import ops
from app.models.network import Batch, Network
from app.schemas.model import Architecture, ModelSpec


class Quadratic(Network):
    arch = Architecture.QUADRATIC.value

    @staticmethod
    def shapes(spec: ModelSpec) -> dict[str, tuple[tuple[int, ...], int]]:
        return {"theta": ((1,), 1)}

    @staticmethod
    def parameter_count(spec: ModelSpec) -> int:
        return 1

    def _forward(self, w, x, input_overlay, training, dropout, rng):
        h = x if input_overlay is None else ops.add(x, input_overlay)
        return ops.mul(h, w["theta"])

    def loss(self, batch: Batch, *, overlays=None, training=False, dropout=0.0, rng=None):
        prediction = self.forward(batch.inputs, overlays=overlays)
        residual = ops.sub(prediction, batch.labels.reshape(prediction.shape))
        return ops.mul(0.5, ops.mean(ops.mul(residual, residual)))

    def predict(self, inputs):
        return self.forward(inputs).data
