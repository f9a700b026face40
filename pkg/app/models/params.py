"""Named parameter tensors with attack-target flags."""

from collections.abc import Iterable, Iterator, Mapping

import numpy as np

from app.autodiff import Tensor
from app.errors import UnknownTargetError

BIAS_SUFFIX = ".b"


def is_bias(name: str) -> bool:
    return name.endswith(BIAS_SUFFIX)


class ParameterSet(Mapping[str, Tensor]):
    """Ordered map name -> trainable tensor.

    ``attackable`` defaults to every non-bias tensor; biases can be selected by name.
    Updates replace the stored tensor rather than writing into it.
    """

    def __init__(self, entries: Mapping[str, np.ndarray] | Iterable[tuple[str, np.ndarray]], attackable: Iterable[str] | None = None):
        items = entries.items() if isinstance(entries, Mapping) else entries
        self._entries: dict[str, Tensor] = {}
        for name, values in items:
            if name in self._entries:
                raise ValueError(f"duplicate parameter name {name!r}")
            self._entries[name] = Tensor(values, requires_grad=True, name=name)
        self._attackable: frozenset[str] = frozenset()
        self.set_attackable(attackable if attackable is not None else [n for n in self._entries if not is_bias(n)])

    def __getitem__(self, name: str) -> Tensor:
        try:
            return self._entries[name]
        except KeyError:
            raise UnknownTargetError(f"unknown parameter {name!r}; known: {list(self._entries)}") from None

    def __contains__(self, name: object) -> bool:
        return name in self._entries

    def get(self, name: str, default: Tensor | None = None) -> Tensor | None:
        return self._entries.get(name, default)

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"ParameterSet({[(n, t.shape) for n, t in self._entries.items()]})"

    @property
    def attackable(self) -> frozenset[str]:
        return self._attackable

    def set_attackable(self, names: Iterable[str]) -> None:
        names = frozenset(names)
        unknown = names - self._entries.keys()
        if unknown:
            raise UnknownTargetError(f"cannot mark unknown parameters as attackable: {sorted(unknown)}")
        self._attackable = names

    @property
    def weight_names(self) -> list[str]:
        return [n for n in self._entries if not is_bias(n)]

    def assign(self, name: str, values: np.ndarray) -> None:
        current = self[name]
        if np.shape(values) != current.shape:
            raise ValueError(f"{name}: expected shape {current.shape}, got {np.shape(values)}")
        self._entries[name] = Tensor(values, requires_grad=True, name=name)

    def zero_grad(self) -> None:
        for tensor in self._entries.values():
            tensor.zero_grad()

    def grads(self) -> dict[str, np.ndarray]:
        """Current gradient per parameter (zeros where no gradient reached it)."""
        return {
            name: t.grad.copy() if t.grad is not None else np.zeros_like(t.data)
            for name, t in self._entries.items()
        }

    def arrays(self) -> dict[str, np.ndarray]:
        return {name: t.data.copy() for name, t in self._entries.items()}

    def copy(self) -> "ParameterSet":
        return ParameterSet(self.arrays(), attackable=self._attackable)

    def count(self) -> int:
        return sum(t.size for t in self._entries.values())

    def norms(self) -> dict[str, float]:
        return {name: float(np.linalg.norm(t.data)) for name, t in self._entries.items()}
