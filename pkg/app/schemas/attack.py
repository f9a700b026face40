"""Attack schemas."""

from enum import Enum

from pydantic import BaseModel, Field, model_validator


class AttackMethod(str, Enum):
    """Attack method enum."""

    FGSM = "fgsm"
    FGM = "fgm"
    PGD = "pgd"
    DROPATTACK = "dropattack"
    DROPATTACK_K = "dropattack_k"


# Fields each method must be given explicitly (no silent defaults for eps, p, K).
REQUIRED_FIELDS: dict[AttackMethod, tuple[str, ...]] = {
    AttackMethod.FGSM: ("eps_x",),
    AttackMethod.FGM: ("eps_x",),
    AttackMethod.PGD: ("pgd_radius", "pgd_step", "k"),
    AttackMethod.DROPATTACK: ("eps_x", "eps_theta", "p_x", "p_theta"),
    AttackMethod.DROPATTACK_K: ("eps_x", "eps_theta", "p_x", "p_theta", "k"),
}

PRESETS: dict[str, dict[str, float]] = {
    "default": {"eps": 5.0, "p": 0.7},
    "sweep_best": {"eps": 7.0, "p": 0.7},
}


class AttackConfig(BaseModel):
    """Hyperparameters of one adversarial-training method.

    ``targets`` lists attacked names: parameter names plus the reserved ``"input"``.
    ``None`` means ``input`` plus every attackable parameter of the model.
    """

    method: AttackMethod
    eps_x: float | None = Field(default=None, ge=0)
    eps_theta: float | None = Field(default=None, ge=0)
    p_x: float | None = Field(default=None, ge=0, le=1)
    p_theta: float | None = Field(default=None, ge=0, le=1)
    k: int | None = Field(default=None, ge=1)
    pgd_radius: float | None = Field(default=None, gt=0)
    pgd_step: float | None = Field(default=None, gt=0)
    targets: list[str] | None = None

    @model_validator(mode="after")
    def _require_method_fields(self) -> "AttackConfig":
        missing = [name for name in REQUIRED_FIELDS[self.method] if getattr(self, name) is None]
        if missing:
            raise ValueError(f"method {self.method.value!r} requires explicit {', '.join(missing)}")
        if self.targets is not None and not self.targets:
            raise ValueError("targets must not be empty")
        return self

    @property
    def steps(self) -> int:
        return self.k if self.k is not None else 1

    @classmethod
    def preset(cls, name: str, *, k: int = 1, targets: list[str] | None = None) -> "AttackConfig":
        """DropAttack preset; ``default`` is eps=5, p=0.7 and ``sweep_best`` is eps=7, p=0.7."""
        values = PRESETS[name]
        return cls(
            method=AttackMethod.DROPATTACK if k == 1 else AttackMethod.DROPATTACK_K,
            eps_x=values["eps"],
            eps_theta=values["eps"],
            p_x=values["p"],
            p_theta=values["p"],
            k=k,
            targets=targets,
        )
