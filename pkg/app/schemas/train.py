"""Training schemas."""

from enum import Enum
from typing import Annotated, Literal

from pydantic import BaseModel, Field, PositiveInt

from app.schemas.attack import AttackConfig


class OptimizerKind(str, Enum):
    """Optimizer enum."""

    SGD = "sgd"
    ADAM = "adam"


class OptimizerConfig(BaseModel):
    """Optimizer settings (betas and eps only apply to Adam)."""

    kind: OptimizerKind = OptimizerKind.ADAM
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    eps: float = Field(default=1e-8, gt=0)


class NoRegularizer(BaseModel):
    kind: Literal["none"] = "none"


class L1Regularizer(BaseModel):
    kind: Literal["l1"] = "l1"
    lam: float = Field(ge=0)


class L2Regularizer(BaseModel):
    kind: Literal["l2"] = "l2"
    lam: float = Field(ge=0)


class DropoutRegularizer(BaseModel):
    kind: Literal["dropout"] = "dropout"
    rate: float = Field(ge=0, lt=1)


class AttackRegularizer(BaseModel):
    kind: Literal["attack"] = "attack"
    attack: AttackConfig


Regularizer = Annotated[
    NoRegularizer | L1Regularizer | L2Regularizer | DropoutRegularizer | AttackRegularizer,
    Field(discriminator="kind"),
]


class TrainConfig(BaseModel):
    """Training loop settings."""

    epochs: int = Field(ge=0)
    batch_size: PositiveInt
    learning_rate: float = Field(gt=0)
    optimizer: OptimizerConfig = OptimizerConfig()
    regularizer: Regularizer = NoRegularizer()
    eval_every: PositiveInt = 1
    seed: int = Field(default=0, ge=0)
    patience: PositiveInt | None = None

    @property
    def attack(self) -> AttackConfig | None:
        return self.regularizer.attack if isinstance(self.regularizer, AttackRegularizer) else None


class MetricsRecord(BaseModel):
    """One evaluation point of a training run."""

    epoch: int
    train_loss: float
    train_acc: float = Field(ge=0, le=1)
    val_loss: float
    val_acc: float = Field(ge=0, le=1)
    seconds: float
    fb_count: int


class SweepRow(BaseModel):
    """Aggregated test accuracy of one (eps, p, K) grid cell."""

    epsilon: float
    p: float
    K: int
    seed_count: int
    mean_test_acc: float
    std_test_acc: float


class ScalingRow(BaseModel):
    """Paired standard vs DropAttack accuracy at one training-set size."""

    size: int
    standard_acc: float
    dropattack_acc: float
    improvement: float
