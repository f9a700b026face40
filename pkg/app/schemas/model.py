"""Model schemas."""

from enum import Enum

from pydantic import BaseModel, Field, PositiveInt, model_validator


class Architecture(str, Enum):
    """Architecture tag enum."""

    MLP = "mlp"
    CNN_LENET_LITE = "cnn_lenet_lite"
    RNN_TEXT = "rnn_text"
    QUADRATIC = "quadratic"


class Activation(str, Enum):
    """Hidden activation enum."""

    RELU = "relu"
    TANH = "tanh"


class InitKind(str, Enum):
    """Initialization scheme enum."""

    UNIFORM_FAN_IN = "uniform_fan_in"
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"


class InitScheme(BaseModel):
    """Parameter initialization.

    ``uniform_fan_in`` draws from U(-1/sqrt(fan_in), 1/sqrt(fan_in)); ``uniform`` from
    U(-scale, scale); ``gaussian`` from N(0, scale^2).
    """

    kind: InitKind = InitKind.UNIFORM_FAN_IN
    scale: float | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _scale_required(self) -> "InitScheme":
        if self.kind != InitKind.UNIFORM_FAN_IN and self.scale is None:
            raise ValueError(f"init kind {self.kind.value!r} needs a scale")
        return self


class ModelSpec(BaseModel):
    """Architecture description.

    ``layer_sizes`` is read per architecture:
    mlp ``[in, hidden..., out]``; cnn_lenet_lite ``[conv1_channels, conv2_channels, hidden]``;
    rnn_text ``[embed_dim, hidden]``; quadratic ``[1]``.
    """

    arch: str
    layer_sizes: list[PositiveInt]
    input_shape: list[PositiveInt]
    num_classes: int = Field(default=2, ge=2)
    activation: Activation = Activation.RELU
    vocab_size: PositiveInt | None = None
    init: InitScheme = InitScheme()
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_layout(self) -> "ModelSpec":
        match self.arch:
            case Architecture.MLP.value:
                if len(self.layer_sizes) < 2:
                    raise ValueError("mlp needs at least [in, out] layer sizes")
                if self.layer_sizes[0] != self.input_shape[-1]:
                    raise ValueError("mlp input size must match input_shape")
                if self.layer_sizes[-1] != self.num_classes:
                    raise ValueError("mlp output size must equal num_classes")
            case Architecture.CNN_LENET_LITE.value:
                if len(self.layer_sizes) != 3 or len(self.input_shape) != 3:
                    raise ValueError("cnn_lenet_lite needs layer_sizes [c1, c2, hidden] and input_shape [C, H, W]")
                if min(self.input_shape[1:]) < 16:
                    raise ValueError("cnn_lenet_lite needs spatial size >= 16")
            case Architecture.RNN_TEXT.value:
                if len(self.layer_sizes) != 2 or len(self.input_shape) != 1:
                    raise ValueError("rnn_text needs layer_sizes [embed, hidden] and input_shape [length]")
                if self.vocab_size is None:
                    raise ValueError("rnn_text needs vocab_size")
        return self
