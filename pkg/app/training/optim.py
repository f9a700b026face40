"""First-order optimizers over a ParameterSet."""

from collections.abc import Mapping

import numpy as np

from app.models.params import ParameterSet
from app.schemas.train import OptimizerConfig, OptimizerKind


class Optimizer:
    def __init__(self, learning_rate: float):
        if learning_rate <= 0:
            raise ValueError(f"learning rate must be positive, got {learning_rate}")
        self.learning_rate = learning_rate

    def step(self, params: ParameterSet, grads: Mapping[str, np.ndarray]) -> None:
        for name, tensor in params.items():
            params.assign(name, tensor.data - self._direction(name, grads[name]))

    def _direction(self, name: str, grad: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class SGD(Optimizer):
    def _direction(self, name, grad):
        return self.learning_rate * grad


class Adam(Optimizer):
    """Adam with bias-corrected moments; one shared step counter for all tensors."""

    def __init__(self, learning_rate: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        super().__init__(learning_rate)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}

    def step(self, params, grads):
        self.t += 1
        super().step(params, grads)

    def _direction(self, name, grad):
        m = self.beta1 * self.m.get(name, 0.0) + (1 - self.beta1) * grad
        v = self.beta2 * self.v.get(name, 0.0) + (1 - self.beta2) * grad * grad
        self.m[name] = m
        self.v[name] = v
        m_hat = m / (1 - self.beta1**self.t)
        v_hat = v / (1 - self.beta2**self.t)
        return self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


def make_optimizer(cfg: OptimizerConfig, learning_rate: float) -> Optimizer:
    match cfg.kind:
        case OptimizerKind.SGD:
            return SGD(learning_rate)
        case OptimizerKind.ADAM:
            return Adam(learning_rate, cfg.beta1, cfg.beta2, cfg.eps)
