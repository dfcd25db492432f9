"""Adam with bias correction, plus an optional step-decay learning-rate schedule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, TrainingDivergenceError

__all__ = ["AdamState", "LrSchedule", "adam_init", "adam_step", "effective_lr"]


@dataclass
class LrSchedule:
    kind: str = "constant"  # "constant" | "step_decay"
    decay_factor: float = 0.9
    decay_every: int = 1000

    def __post_init__(self):
        if self.kind not in ("constant", "step_decay"):
            raise ConfigurationError(f"unknown schedule kind {self.kind!r}")
        if not 0.0 < self.decay_factor <= 1.0:
            raise ConfigurationError("decay factor must lie in (0, 1]")
        if self.decay_every < 1:
            raise ConfigurationError("decay interval must be a positive epoch count")


def effective_lr(schedule: LrSchedule, base_lr: float, epoch: int) -> float:
    """Learning rate in force at a given epoch (epoch 0 = before any decay)."""
    if epoch < 0:
        raise ConfigurationError(f"epoch must be nonnegative, got {epoch}")
    if schedule.kind == "constant":
        return base_lr
    return base_lr * schedule.decay_factor ** (epoch // schedule.decay_every)


@dataclass
class AdamState:
    lr: float
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps_hat: float = 1e-8
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)


def adam_init(params: list[np.ndarray], lr: float, beta1: float = 0.9,
              beta2: float = 0.999, eps_hat: float = 1e-8) -> AdamState:
    if not lr > 0:
        raise ConfigurationError(f"learning rate must be positive, got {lr}")
    return AdamState(
        lr=lr, beta1=beta1, beta2=beta2, eps_hat=eps_hat,
        m=[np.zeros_like(p) for p in params],
        v=[np.zeros_like(p) for p in params],
    )


def adam_step(state: AdamState, params: list[np.ndarray],
              grads: list[np.ndarray]) -> AdamState:
    """One bias-corrected Adam update, in place on ``params``.

    theta <- theta - lr * m_hat / (sqrt(v_hat) + eps_hat) with
    m_hat = m / (1 - beta1^t), v_hat = v / (1 - beta2^t).
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ConfigurationError("parameter/gradient/state lengths differ")
    for g in grads:
        if not np.all(np.isfinite(g)):
            raise TrainingDivergenceError(state.step_count + 1, None)
    state.step_count += 1
    c1 = 1.0 - state.beta1 ** state.step_count
    c2 = 1.0 - state.beta2 ** state.step_count
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        p -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps_hat)
    return state
