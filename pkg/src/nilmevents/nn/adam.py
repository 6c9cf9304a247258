"""Adam optimizer over named parameter blocks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeMismatchError


@dataclass
class AdamState:
    """Moment estimates and step counter for one parameter set.

    The moment dictionaries mirror the parameter blocks exactly (same keys,
    same shapes). ``t`` counts completed steps and is incremented before the
    bias correction.
    """

    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 < self.beta1 < 1.0 or not 0.0 < self.beta2 < 1.0:
            raise ValueError("beta1 and beta2 must lie in (0, 1)")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.t < 0:
            raise ValueError("step counter must be non-negative")


def adam_step(
    state: AdamState, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]
) -> tuple[dict[str, np.ndarray], AdamState]:
    """Apply one bias-corrected Adam update to every parameter block in place.

    ``params`` and ``grads`` must share keys and shapes. Returns the same
    (mutated) dictionaries/state so calls can be chained; the caller owns all
    state, so distinct optimizers never interact.
    """
    if set(params) != set(grads):
        missing = set(params) ^ set(grads)
        raise ShapeMismatchError(f"parameter/gradient key mismatch: {sorted(missing)}")
    state.t += 1
    bias1 = 1.0 - state.beta1**state.t
    bias2 = 1.0 - state.beta2**state.t
    for name, theta in params.items():
        g = grads[name]
        if g.shape != theta.shape:
            raise ShapeMismatchError(
                f"gradient for {name!r} has shape {g.shape}, parameter has {theta.shape}"
            )
        if name not in state.m:
            state.m[name] = np.zeros_like(theta)
            state.v[name] = np.zeros_like(theta)
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        m_hat = m / bias1
        v_hat = v / bias2
        theta -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return params, state
