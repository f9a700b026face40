"""Forward ops with their backward rules.

Each op computes its value with numpy, validates shapes up front (``ShapeError`` names both
shapes) and, when a tape is active and an input requires gradients, records a closure that maps
the upstream gradient to one gradient per input.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from app.autodiff.rng import Rng
from app.autodiff.tensor import Tensor, as_tensor, current_tape
from app.errors import ShapeError


def _result(op: str, value: np.ndarray, inputs: tuple[Tensor, ...], backward, **saved) -> Tensor:
    tape = current_tape()
    track = tape is not None and any(t.requires_grad for t in inputs)
    out = Tensor._from_op(value, op, requires_grad=track)
    if track:
        tape.record(op, inputs, out, backward, saved)
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    g = grad
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(op, a.shape, b.shape) from None


def _as_indices(op: str, values, upper: int) -> np.ndarray:
    arr = values.data if isinstance(values, Tensor) else np.asarray(values)
    idx = arr.astype(np.int64)
    if not np.array_equal(idx, arr):
        raise ShapeError(op, arr.shape, detail="indices must be integral")
    if idx.size and (idx.min() < 0 or idx.max() >= upper):
        raise ShapeError(op, arr.shape, detail=f"indices must lie in [0, {upper})")
    return idx


# elementwise arithmetic


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("add", a, b)

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _result("add", a.data + b.data, (a, b), backward)


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("sub", a, b)

    def backward(g):
        return _unbroadcast(g, a.shape), -_unbroadcast(g, b.shape)

    return _result("sub", a.data - b.data, (a, b), backward)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("mul", a, b)

    def backward(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return _result("mul", a.data * b.data, (a, b), backward)


def neg(a) -> Tensor:
    a = as_tensor(a)
    return _result("neg", -a.data, (a,), lambda g: (-g,))


def abs_(a) -> Tensor:
    """|a| with derivative sgn(a), sgn(0) = 0."""
    a = as_tensor(a)
    sign = np.sign(a.data)
    return _result("abs", np.abs(a.data), (a,), lambda g: (g * sign,))


# reductions and reshaping


def sum_(a) -> Tensor:
    a = as_tensor(a)
    return _result("sum", np.array(a.data.sum()), (a,), lambda g: (np.broadcast_to(g, a.shape),))


def mean(a) -> Tensor:
    a = as_tensor(a)
    n = a.data.size
    return _result("mean", np.array(a.data.mean()), (a,), lambda g: (np.broadcast_to(g / n, a.shape),))


def reshape(a, shape: tuple[int, ...]) -> Tensor:
    a = as_tensor(a)
    try:
        value = a.data.reshape(shape)
    except ValueError:
        raise ShapeError("reshape", a.shape, tuple(shape)) from None
    return _result("reshape", value, (a,), lambda g: (g.reshape(a.shape),))


def flatten(a) -> Tensor:
    """Collapse every axis after the batch axis."""
    a = as_tensor(a)
    if a.data.ndim < 1:
        raise ShapeError("flatten", a.shape, detail="needs a batch axis")
    return reshape(a, (a.shape[0], -1))


def getitem(a, index) -> Tensor:
    a = as_tensor(a)
    value = a.data[index]

    def backward(g):
        full = np.zeros_like(a.data)
        np.add.at(full, index, g)
        return (full,)

    return _result("getitem", np.array(value), (a,), backward)


# linear algebra


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError("matmul", a.shape, b.shape)

    def backward(g):
        return g @ b.data.T, a.data.T @ g

    return _result("matmul", a.data @ b.data, (a, b), backward)


# activations


def relu(a) -> Tensor:
    """max(a, 0) with relu'(0) = 0."""
    a = as_tensor(a)
    mask = a.data > 0
    return _result("relu", np.where(mask, a.data, 0.0), (a,), lambda g: (g * mask,), pattern=mask)


def tanh(a) -> Tensor:
    a = as_tensor(a)
    y = np.tanh(a.data)
    return _result("tanh", y, (a,), lambda g: (g * (1.0 - y * y),))


def sigmoid(a) -> Tensor:
    a = as_tensor(a)
    y = 0.5 * (1.0 + np.tanh(0.5 * a.data))
    return _result("sigmoid", y, (a,), lambda g: (g * y * (1.0 - y),))


# convolutional layers


def conv2d(a, kernel, stride: int = 1) -> Tensor:
    """Valid (unpadded) cross-correlation of NCHW input with an FCkk kernel."""
    a, kernel = as_tensor(a), as_tensor(kernel)
    if (
        a.data.ndim != 4
        or kernel.data.ndim != 4
        or a.shape[1] != kernel.shape[1]
        or a.shape[2] < kernel.shape[2]
        or a.shape[3] < kernel.shape[3]
    ):
        raise ShapeError("conv2d", a.shape, kernel.shape)
    if stride < 1:
        raise ShapeError("conv2d", a.shape, kernel.shape, f"stride must be >= 1, got {stride}")

    kh, kw = kernel.shape[2], kernel.shape[3]
    windows = sliding_window_view(a.data, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    out_h, out_w = windows.shape[2], windows.shape[3]
    value = np.einsum("nchwij,fcij->nfhw", windows, kernel.data, optimize=True)

    def backward(g):
        grad_kernel = np.einsum("nfhw,nchwij->fcij", g, windows, optimize=True)
        grad_input = np.zeros_like(a.data)
        for i in range(kh):
            for j in range(kw):
                grad_input[:, :, i : i + stride * out_h : stride, j : j + stride * out_w : stride] += np.einsum(
                    "nfhw,fc->nchw", g, kernel.data[:, :, i, j], optimize=True
                )
        return grad_input, grad_kernel

    return _result("conv2d", value, (a, kernel), backward)


def maxpool2d(a, window: int) -> Tensor:
    """Non-overlapping max pooling; trailing rows/columns that do not fill a window are dropped."""
    a = as_tensor(a)
    if a.data.ndim != 4 or window < 1 or a.shape[2] < window or a.shape[3] < window:
        raise ShapeError("maxpool2d", a.shape, (window, window))

    n, c, h, w = a.shape
    out_h, out_w = h // window, w // window
    cropped = a.data[:, :, : out_h * window, : out_w * window]
    blocks = (
        cropped.reshape(n, c, out_h, window, out_w, window)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, out_h, out_w, window * window)
    )
    winner = blocks.argmax(axis=-1)
    value = np.take_along_axis(blocks, winner[..., None], axis=-1)[..., 0]

    def backward(g):
        routed = np.zeros_like(blocks)
        np.put_along_axis(routed, winner[..., None], g[..., None], axis=-1)
        routed = (
            routed.reshape(n, c, out_h, out_w, window, window)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(n, c, out_h * window, out_w * window)
        )
        full = np.zeros_like(a.data)
        full[:, :, : out_h * window, : out_w * window] = routed
        return (full,)

    return _result("maxpool2d", value, (a,), backward, pattern=winner)


# embeddings


def embed_lookup(table, indices) -> Tensor:
    """Rows of ``table`` selected by an integer index array; output shape ``indices.shape + (D,)``."""
    table = as_tensor(table)
    if table.data.ndim != 2:
        raise ShapeError("embed_lookup", table.shape, detail="table must be (vocab, dim)")
    idx = _as_indices("embed_lookup", indices, table.shape[0])

    def backward(g):
        grad_table = np.zeros_like(table.data)
        np.add.at(grad_table, idx, g)
        return (grad_table,)

    return _result("embed_lookup", table.data[idx], (table,), backward)


# regularization


def dropout(a, rate: float, rng: Rng | None, training: bool) -> Tensor:
    """Inverted dropout; identity in eval mode or at rate 0."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must lie in [0, 1), got {rate}")
    a = as_tensor(a)
    if not training or rate == 0.0:
        return a
    if rng is None:
        raise ValueError("dropout in training mode needs an Rng")
    keep = rng.bernoulli(1.0 - rate, a.shape) / (1.0 - rate)
    return _result("dropout", a.data * keep, (a,), lambda g: (g * keep,))


# losses


def softmax_cross_entropy(logits, labels) -> Tensor:
    """Mean negative log-likelihood of integer ``labels`` under softmax(``logits``)."""
    logits = as_tensor(logits)
    if logits.data.ndim not in (1, 2):
        raise ShapeError("softmax_cross_entropy", logits.shape, detail="logits must be (batch, classes)")
    z = logits.data.reshape(1, -1) if logits.data.ndim == 1 else logits.data
    n, classes = z.shape
    y = _as_indices("softmax_cross_entropy", labels, classes).reshape(-1)
    if y.shape[0] != n:
        raise ShapeError("softmax_cross_entropy", logits.shape, y.shape)

    shifted = z - z.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_norm
    value = -log_probs[np.arange(n), y].mean()

    def backward(g):
        probs = np.exp(log_probs)
        probs[np.arange(n), y] -= 1.0
        return ((g * probs / n).reshape(logits.shape),)

    return _result("softmax_cross_entropy", np.array(value), (logits,), backward)


Tensor.__add__ = add
Tensor.__radd__ = lambda self, other: add(other, self)
Tensor.__sub__ = sub
Tensor.__rsub__ = lambda self, other: sub(other, self)
Tensor.__mul__ = mul
Tensor.__rmul__ = lambda self, other: mul(other, self)
Tensor.__neg__ = neg
Tensor.__matmul__ = matmul
Tensor.__getitem__ = getitem
