"""LeNet-lite: conv(k5) - pool - conv(k5) - pool - fc - fc."""

from app.autodiff import ops
from app.models.network import Network
from app.schemas.model import Architecture, ModelSpec

KERNEL = 5
POOL = 2


def _feature_side(side: int) -> int:
    side = (side - KERNEL + 1) // POOL
    return (side - KERNEL + 1) // POOL


class LeNetLite(Network):
    arch = Architecture.CNN_LENET_LITE.value

    @staticmethod
    def shapes(spec: ModelSpec) -> dict[str, tuple[tuple[int, ...], int]]:
        channels, h, w = spec.input_shape
        c1, c2, hidden = spec.layer_sizes
        flat = c2 * _feature_side(h) * _feature_side(w)
        return {
            "conv1.w": ((c1, channels, KERNEL, KERNEL), channels * KERNEL * KERNEL),
            "conv1.b": ((c1,), channels * KERNEL * KERNEL),
            "conv2.w": ((c2, c1, KERNEL, KERNEL), c1 * KERNEL * KERNEL),
            "conv2.b": ((c2,), c1 * KERNEL * KERNEL),
            "fc1.w": ((flat, hidden), flat),
            "fc1.b": ((hidden,), flat),
            "fc2.w": ((hidden, spec.num_classes), hidden),
            "fc2.b": ((spec.num_classes,), hidden),
        }

    @staticmethod
    def parameter_count(spec: ModelSpec) -> int:
        channels, h, w = spec.input_shape
        c1, c2, hidden = spec.layer_sizes
        k2 = KERNEL * KERNEL
        flat = c2 * _feature_side(h) * _feature_side(w)
        return (
            c1 * channels * k2 + c1
            + c2 * c1 * k2 + c2
            + flat * hidden + hidden
            + hidden * spec.num_classes + spec.num_classes
        )

    def _forward(self, w, x, input_overlay, training, dropout, rng):
        h = x if input_overlay is None else ops.add(x, input_overlay)
        for layer in ("conv1", "conv2"):
            bias = ops.reshape(w[f"{layer}.b"], (-1, 1, 1))
            h = ops.add(ops.conv2d(h, w[f"{layer}.w"]), bias)
            h = ops.maxpool2d(ops.relu(h), POOL)
        h = ops.flatten(h)
        h = ops.relu(ops.add(ops.matmul(h, w["fc1.w"]), w["fc1.b"]))
        h = ops.dropout(h, dropout, rng, training)
        return ops.add(ops.matmul(h, w["fc2.w"]), w["fc2.b"])
