"""
First-order optimizers able to descend (minimising player) or ascend (maximising player).
Every optimizer instance carries the state of a single player.
"""
import math
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from .config import OptimizerKind, OptimizerSettings, StepSchedule


class Optimizer(ABC):
    """
    Base class for optimizers.
    Args:
        step_size: learning rate
    """

    def __init__(self, step_size: float):
        self.step_size = step_size

    def update(self, params: np.ndarray, grad: np.ndarray, maximize: bool = False) -> np.ndarray:
        """
        One optimisation step.
        Args:
            params: current parameters
            grad: gradient of the objective at `params`
            maximize: ascend instead of descend

        Returns:
            The new parameters.
        """
        step = self._step(grad)
        return params + step if maximize else params - step

    @abstractmethod
    def _step(self, grad: np.ndarray) -> np.ndarray:
        """The (positive) step along the gradient, updating internal state."""


class GradientDescent(Optimizer):
    def _step(self, grad: np.ndarray) -> np.ndarray:
        return self.step_size * grad


class Momentum(Optimizer):
    """Heavy-ball momentum: v <- beta v + g, step = lr v."""

    def __init__(self, step_size: float, beta: float = 0.9):
        super().__init__(step_size)
        self.beta = beta
        self._velocity: Optional[np.ndarray] = None

    def _step(self, grad: np.ndarray) -> np.ndarray:
        self._velocity = grad.copy() if self._velocity is None else self.beta * self._velocity + grad
        return self.step_size * self._velocity


class Adam(Optimizer):
    """Adaptive moment estimation with bias correction."""

    def __init__(self, step_size: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        super().__init__(step_size)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m: Optional[np.ndarray] = None
        self._v: Optional[np.ndarray] = None

    def _step(self, grad: np.ndarray) -> np.ndarray:
        if self._m is None:
            self._m = np.zeros_like(grad)
            self._v = np.zeros_like(grad)
        self.t += 1
        self._m = self.beta1 * self._m + (1 - self.beta1) * grad
        self._v = self.beta2 * self._v + (1 - self.beta2) * grad**2
        m_hat = self._m / (1 - self.beta1**self.t)
        v_hat = self._v / (1 - self.beta2**self.t)
        return self.step_size * m_hat / (np.sqrt(v_hat) + self.eps)


def build_optimizer(settings: OptimizerSettings, step_size: float) -> Optimizer:
    """
    Instantiate a fresh optimizer (with empty state) from its settings.
    """
    if settings.kind == OptimizerKind.plain_gd:
        return GradientDescent(step_size)
    if settings.kind == OptimizerKind.momentum:
        return Momentum(step_size, settings.beta)
    if settings.kind == OptimizerKind.adam:
        return Adam(step_size, settings.beta1, settings.beta2, settings.eps)
    raise NotImplementedError(f"Optimizer {settings.kind} not implemented")


def scheduled_step_size(
    step_size: float, schedule: StepSchedule, final_step_ratio: float, iteration: int, iterations: int
) -> float:
    """
    Step size of iteration `iteration` (0 based) out of `iterations`.
    Decaying schedules start at `step_size` and reach `step_size * final_step_ratio` at the last iteration.
    """
    if schedule == StepSchedule.constant or iterations < 2:
        return step_size
    progress = min(iteration, iterations - 1) / (iterations - 1)
    if schedule == StepSchedule.geometric:
        return step_size * final_step_ratio**progress
    if schedule == StepSchedule.cosine:
        return step_size * (final_step_ratio + (1 - final_step_ratio) * 0.5 * (1 + math.cos(math.pi * progress)))
    raise NotImplementedError(f"Step schedule {schedule} not implemented")
