"""Model zoo: desk-scale classifiers exposing named parameter tensors."""

from app.autodiff import Rng
from app.errors import UnknownArchitectureError
from app.models.lenet import LeNetLite
from app.models.mlp import MLP
from app.models.network import INPUT, Batch, Network, forward_with_overlay
from app.models.params import ParameterSet, is_bias
from app.models.quadratic import Quadratic
from app.models.rnn import TextRNN
from app.schemas.model import InitKind, ModelSpec

ARCHITECTURES: dict[str, type[Network]] = {
    cls.arch: cls for cls in (MLP, LeNetLite, TextRNN, Quadratic)
}


def network_class(arch: str) -> type[Network]:
    try:
        return ARCHITECTURES[arch]
    except KeyError:
        raise UnknownArchitectureError(
            f"unknown architecture {arch!r}; expected one of {sorted(ARCHITECTURES)}"
        ) from None


def parameter_count(spec: ModelSpec) -> int:
    """Closed-form number of trainable scalars for a spec."""
    return network_class(spec.arch).parameter_count(spec)


def build(spec: ModelSpec, rng: Rng | None = None) -> Network:
    """Build and initialize a network; the same model spec and rng always give the same parameters.

    Each tensor draws from its own child stream named after the parameter, so adding a layer
    never shifts the initialization of the others.
    """
    cls = network_class(spec.arch)
    rng = rng if rng is not None else Rng(spec.seed)
    entries = {}
    for name, (shape, fan_in) in cls.shapes(spec).items():
        stream = rng.child("init", name)
        match spec.init.kind:
            case InitKind.UNIFORM_FAN_IN:
                bound = 1.0 / fan_in**0.5
                entries[name] = stream.uniform(-bound, bound, shape)
            case InitKind.UNIFORM:
                entries[name] = stream.uniform(-spec.init.scale, spec.init.scale, shape)
            case InitKind.GAUSSIAN:
                entries[name] = stream.normal(shape, spec.init.scale)
    return cls(spec, ParameterSet(entries))


__all__ = [
    "ARCHITECTURES",
    "INPUT",
    "Batch",
    "LeNetLite",
    "MLP",
    "Network",
    "ParameterSet",
    "Quadratic",
    "TextRNN",
    "build",
    "forward_with_overlay",
    "is_bias",
    "network_class",
    "parameter_count",
]
