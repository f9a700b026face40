"""L1 / L2 weight penalties, built on the active tape so they take part in backward."""

from app.autodiff import Tensor, ops
from app.models.params import ParameterSet
from app.schemas.train import L1Regularizer, L2Regularizer, Regularizer


def l1_penalty(params: ParameterSet, lam: float) -> Tensor:
    """``lam * sum |w|`` over weights (biases excluded)."""
    total = Tensor(0.0)
    for name in params.weight_names:
        total = ops.add(total, ops.sum_(ops.abs_(params[name])))
    return ops.mul(lam, total)


def l2_penalty(params: ParameterSet, lam: float) -> Tensor:
    """``lam * sum w^2`` over weights (biases excluded)."""
    total = Tensor(0.0)
    for name in params.weight_names:
        w = params[name]
        total = ops.add(total, ops.sum_(ops.mul(w, w)))
    return ops.mul(lam, total)


def penalty(params: ParameterSet, regularizer: Regularizer) -> Tensor | None:
    match regularizer:
        case L1Regularizer(lam=lam):
            return l1_penalty(params, lam)
        case L2Regularizer(lam=lam):
            return l2_penalty(params, lam)
    return None
