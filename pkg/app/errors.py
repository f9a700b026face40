"""Exception hierarchy shared by every layer of the laboratory."""


class LabError(Exception):
    """Base class for all laboratory errors."""


class ShapeError(LabError):
    """Operands of an op are not conformable."""

    def __init__(self, op: str, a: tuple[int, ...], b: tuple[int, ...] | None = None, detail: str = ""):
        self.op = op
        self.shapes = (a, b)
        msg = f"{op}: incompatible shapes {a}" + (f" and {b}" if b is not None else "")
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NonFiniteError(LabError):
    """An op produced NaN or Inf."""

    def __init__(self, op: str):
        self.op = op
        super().__init__(f"{op}: non-finite value produced")


class TapeError(LabError):
    """Backward was called on something that cannot be differentiated."""


class UnknownArchitectureError(LabError):
    pass


class UnknownTargetError(LabError):
    """A name does not match any parameter (or the reserved input target)."""


class AttackConfigError(LabError):
    pass


class IdxFormatError(LabError):
    pass


class DatasetError(LabError):
    pass


class DegenerateModelError(LabError):
    pass


class ConfigError(LabError):
    """Experiment configuration could not be loaded or validated."""

    def __init__(self, path: str, message: str, field: str | None = None, line: int | None = None):
        self.path = path
        self.field = field
        self.line = line
        where = path
        if line is not None:
            where += f":{line}"
        if field:
            where += f" [{field}]"
        super().__init__(f"{where}: {message}")


class TrainingAborted(LabError):
    """Training hit a non-finite loss or gradient."""

    def __init__(self, epoch: int, batch: int, layer_norms: dict[str, float], cause: str):
        self.epoch = epoch
        self.batch = batch
        self.layer_norms = layer_norms
        norms = ", ".join(f"{k}={v:.4g}" for k, v in layer_norms.items())
        super().__init__(f"non-finite value at epoch {epoch}, batch {batch}: {cause}; layer norms: {norms}")
