"""Optimizers: Adam with bias correction, and plain gradient descent."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["AdamState", "adam_step", "sgd_step"]

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class AdamState:
    """First/second moment accumulators and the step counter."""

    m: list = field(default_factory=list)
    v: list = field(default_factory=list)
    t: int = 0

    @classmethod
    def for_parameters(cls, params: list[np.ndarray]) -> "AdamState":
        return cls(m=[np.zeros_like(p) for p in params], v=[np.zeros_like(p) for p in params], t=0)


def adam_step(
    params: list[np.ndarray],
    grads: list[np.ndarray],
    state: AdamState,
    learning_rate: float,
) -> AdamState:
    """One in-place Adam update (beta1=0.9, beta2=0.999, eps=1e-8).

    Moments use the standard exponential averages with bias correction;
    the update is deterministic given (params, grads, state).
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ValueError("parameter, gradient, and state lists must align")
    state.t += 1
    b1t = 1.0 - ADAM_BETA1**state.t
    b2t = 1.0 - ADAM_BETA2**state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= ADAM_BETA1
        m += (1.0 - ADAM_BETA1) * g
        v *= ADAM_BETA2
        v += (1.0 - ADAM_BETA2) * (g * g)
        p -= learning_rate * (m / b1t) / (np.sqrt(v / b2t) + ADAM_EPS)
    return state


def sgd_step(params: list[np.ndarray], grads: list[np.ndarray], learning_rate: float) -> None:
    """Plain gradient-descent update, in place."""
    if len(params) != len(grads):
        raise ValueError("parameter and gradient lists must align")
    for p, g in zip(params, grads):
        p -= learning_rate * g
