"""Text classifier: embedding -> single tanh RNN -> fc.

The input target of a text model is the embedding output, so input overlays have shape
``(batch, length, embed_dim)``.
"""

import numpy as np

from app.autodiff import Tensor, ops
from app.models.network import Network
from app.schemas.model import Architecture, ModelSpec


class TextRNN(Network):
    arch = Architecture.RNN_TEXT.value

    @staticmethod
    def shapes(spec: ModelSpec) -> dict[str, tuple[tuple[int, ...], int]]:
        embed, hidden = spec.layer_sizes
        return {
            # embedding rows are looked up, not summed, so fan-in is 1
            "embedding": ((spec.vocab_size, embed), 1),
            "rnn.ih.w": ((embed, hidden), embed),
            "rnn.hh.w": ((hidden, hidden), hidden),
            "rnn.b": ((hidden,), hidden),
            "fc.w": ((hidden, spec.num_classes), hidden),
            "fc.b": ((spec.num_classes,), hidden),
        }

    @staticmethod
    def parameter_count(spec: ModelSpec) -> int:
        embed, hidden = spec.layer_sizes
        return (
            spec.vocab_size * embed
            + embed * hidden + hidden * hidden + hidden
            + hidden * spec.num_classes + spec.num_classes
        )

    def input_overlay_shape(self, inputs: np.ndarray) -> tuple[int, ...]:
        return (*inputs.shape, self.spec.layer_sizes[0])

    def _forward(self, w, x, input_overlay, training, dropout, rng):
        e = ops.embed_lookup(w["embedding"], x.data)
        if input_overlay is not None:
            e = ops.add(e, input_overlay)
        batch, length = x.shape
        h = Tensor(np.zeros((batch, self.spec.layer_sizes[1])))
        for t in range(length):
            step = ops.add(ops.matmul(e[:, t, :], w["rnn.ih.w"]), ops.matmul(h, w["rnn.hh.w"]))
            h = ops.tanh(ops.add(step, w["rnn.b"]))
        h = ops.dropout(h, dropout, rng, training)
        return ops.add(ops.matmul(h, w["fc.w"]), w["fc.b"])
