"""Tensors and the define-by-run differentiation tape."""

from collections.abc import Callable
from contextvars import ContextVar
from dataclasses import dataclass, field

import numpy as np

from app.errors import NonFiniteError, TapeError

BackwardFn = Callable[[np.ndarray], tuple[np.ndarray | None, ...]]

_active_tape: ContextVar["Tape | None"] = ContextVar("active_tape", default=None)


class Tensor:
    """Dense float64 array that can take part in a recorded computation.

    Values are read-only once written; only ``grad`` is mutated (by backward passes and
    :meth:`zero_grad`). ``tape``/``tape_id`` are set when the tensor is the output of an op
    recorded on a tape; leaves (parameters, inputs, overlays) have neither.
    """

    __slots__ = ("data", "requires_grad", "grad", "tape", "tape_id", "name")

    def __init__(self, data, requires_grad: bool = False, *, name: str | None = None):
        arr = np.array(data, dtype=np.float64)
        self._init(arr, requires_grad, name, op="tensor")

    def _init(self, arr: np.ndarray, requires_grad: bool, name: str | None, op: str) -> None:
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError(op)
        arr.flags.writeable = False
        self.data = arr
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self.tape: Tape | None = None
        self.tape_id: int | None = None
        self.name = name

    @classmethod
    def _from_op(cls, value: np.ndarray, op: str, requires_grad: bool) -> "Tensor":
        out = cls.__new__(cls)
        out._init(np.asarray(value, dtype=np.float64), requires_grad, None, op)
        return out

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.data.size != 1:
            raise ValueError(f"item() needs a single element, tensor has shape {self.shape}")
        return float(self.data.reshape(()))

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def _accumulate(self, g: np.ndarray) -> None:
        if g.shape != self.data.shape:
            g = g.reshape(self.data.shape)
        if self.grad is None:
            self.grad = np.array(g, dtype=np.float64)
        else:
            self.grad = self.grad + g


def as_tensor(value) -> Tensor:
    """Coerce numbers and arrays to constant tensors; tensors pass through."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


@dataclass
class Node:
    """One recorded operation."""

    op: str
    inputs: tuple[Tensor, ...]
    output: Tensor
    backward: BackwardFn
    saved: dict = field(default_factory=dict)


class Tape:
    """Append-only record of the ops of one forward pass.

    Used as a context manager; ops executed inside the block whose inputs require gradients
    are recorded in order, so the node list is topologically sorted by construction.
    """

    def __init__(self):
        self.nodes: list[Node] = []
        self._token = None

    def __enter__(self) -> "Tape":
        self._token = _active_tape.set(self)
        return self

    def __exit__(self, *exc) -> None:
        _active_tape.reset(self._token)
        self._token = None

    def __len__(self) -> int:
        return len(self.nodes)

    def record(self, op: str, inputs: tuple[Tensor, ...], output: Tensor, backward: BackwardFn, saved: dict) -> None:
        output.tape = self
        output.tape_id = len(self.nodes)
        self.nodes.append(Node(op, inputs, output, backward, saved))

    def backward(self, loss: Tensor) -> None:
        """Accumulate d(loss)/d(leaf) into ``grad`` of every reachable leaf that requires it."""
        if loss.data.size != 1:
            raise TapeError(f"backward needs a scalar loss, got shape {loss.shape}")
        if loss.tape is not self or loss.tape_id is None:
            raise TapeError("loss was not recorded on this tape")
        if not self.nodes:
            raise TapeError("tape is empty")

        upstream: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
        for node in reversed(self.nodes[: loss.tape_id + 1]):
            g = upstream.pop(id(node.output), None)
            if g is None:
                continue
            grads = node.backward(g)
            for inp, gi in zip(node.inputs, grads):
                if gi is None or not inp.requires_grad:
                    continue
                if inp.tape is self:
                    prev = upstream.get(id(inp))
                    upstream[id(inp)] = gi if prev is None else prev + gi
                else:
                    inp._accumulate(gi)

    def kink_signature(self) -> tuple[bytes, ...]:
        """Activation patterns of the non-smooth ops (relu masks, maxpool winners)."""
        return tuple(node.saved["pattern"].tobytes() for node in self.nodes if "pattern" in node.saved)


def current_tape() -> Tape | None:
    return _active_tape.get()


def backward(loss: Tensor) -> None:
    """Backpropagate from a scalar loss through the tape that produced it."""
    if loss.tape is None:
        raise TapeError("loss is detached: it was not computed inside a Tape block")
    loss.tape.backward(loss)
