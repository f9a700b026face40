"""Fully connected classifier: ``fc1 -> act -> ... -> fcN``."""

from app.autodiff import ops
from app.models.network import Network
from app.schemas.model import Activation, Architecture, ModelSpec


class MLP(Network):
    arch = Architecture.MLP.value

    @staticmethod
    def shapes(spec: ModelSpec) -> dict[str, tuple[tuple[int, ...], int]]:
        """name -> (shape, fan_in)."""
        shapes = {}
        sizes = spec.layer_sizes
        for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:]), start=1):
            shapes[f"fc{i}.w"] = ((fan_in, fan_out), fan_in)
            shapes[f"fc{i}.b"] = ((fan_out,), fan_in)
        return shapes

    @staticmethod
    def parameter_count(spec: ModelSpec) -> int:
        sizes = spec.layer_sizes
        return sum(a * b + b for a, b in zip(sizes[:-1], sizes[1:]))

    def _forward(self, w, x, input_overlay, training, dropout, rng):
        act = ops.relu if self.spec.activation == Activation.RELU else ops.tanh
        h = x if input_overlay is None else ops.add(x, input_overlay)
        layers = len(self.spec.layer_sizes) - 1
        for i in range(1, layers + 1):
            h = ops.add(ops.matmul(h, w[f"fc{i}.w"]), w[f"fc{i}.b"])
            if i < layers:
                h = ops.dropout(act(h), dropout, rng, training)
        return h
