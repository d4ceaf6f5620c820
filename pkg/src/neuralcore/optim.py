"""Adam optimizer state and update."""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from src.neuralcore.layers import Mlp
from src.neuralcore.matrix import Matrix, ensure_finite

DEFAULT_LR = 2e-4
DEFAULT_BETA1 = 0.5
DEFAULT_BETA2 = 0.999
DEFAULT_EPSILON = 1e-8


class LrSchedule(str, Enum):
    """How the learning rate moves from its initial to its final value."""

    CONSTANT = "constant"
    COSINE = "cosine"
    EXPONENTIAL = "exponential"


def scheduled_learning_rate(
    schedule: LrSchedule, initial: float, final: float, step: int, total_steps: int
) -> float:
    """Learning rate for 1-based ``step`` of ``total_steps``; reaches ``final`` at the last step."""
    schedule = LrSchedule(schedule)
    if schedule is LrSchedule.CONSTANT or total_steps <= 1 or step <= 1:
        return initial
    progress = min((step - 1) / (total_steps - 1), 1.0)
    if schedule is LrSchedule.COSINE:
        return final + 0.5 * (initial - final) * (1.0 + math.cos(math.pi * progress))
    return initial * (final / initial) ** progress


@dataclass
class AdamState:
    """First/second moment accumulators for one network's parameters."""

    learning_rate: float = DEFAULT_LR
    beta1: float = DEFAULT_BETA1
    beta2: float = DEFAULT_BETA2
    epsilon: float = DEFAULT_EPSILON
    step: int = 0
    first_moments: list[Matrix] = field(default_factory=list)
    second_moments: list[Matrix] = field(default_factory=list)

    @classmethod
    def for_network(cls, net: Mlp, **hyper: float) -> "AdamState":
        params = [p for p, _ in net.parameters()]
        return cls(
            **hyper,
            first_moments=[np.zeros_like(p) for p in params],
            second_moments=[np.zeros_like(p) for p in params],
        )


def adam_step(net: Mlp, state: AdamState) -> None:
    """Apply one bias-corrected Adam update to ``net`` and zero its gradients."""
    pairs = list(net.parameters())
    if not state.first_moments:
        state.first_moments = [np.zeros_like(p) for p, _ in pairs]
        state.second_moments = [np.zeros_like(p) for p, _ in pairs]
    if len(state.first_moments) != len(pairs):
        raise ValueError(
            f"optimizer tracks {len(state.first_moments)} tensors, network has {len(pairs)}"
        )
    for _, grad in pairs:
        ensure_finite(grad, "parameter gradient")

    state.step += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1**state.step
    correction2 = 1.0 - b2**state.step
    for (param, grad), m, v in zip(pairs, state.first_moments, state.second_moments):
        m *= b1
        m += (1.0 - b1) * grad
        v *= b2
        v += (1.0 - b2) * grad * grad
        m_hat = m / correction1
        v_hat = v / correction2
        param -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
    net.zero_grad()
