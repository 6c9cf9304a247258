"""Gated recurrent unit cell: forward pass and backpropagation through time.

Uses the standard formulation

    z_t = sigmoid(W_z x_t + U_z h_prev + b_z)          (update gate)
    r_t = sigmoid(W_r x_t + U_r h_prev + b_r)          (reset gate)
    c_t = tanh(W_c x_t + U_c (r_t * h_prev) + b_c)     (candidate state)
    h_t = (1 - z_t) * h_prev + z_t * c_t

so with all-zero parameters the update gate is 0.5, the candidate is 0 and
h_t = 0.5 * h_prev.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeMismatchError
from .layers import _as_batch


@dataclass
class GruCellParams:
    """Weight matrices (hidden x input, hidden x hidden) and biases per gate."""

    update_w: np.ndarray
    update_u: np.ndarray
    update_b: np.ndarray
    reset_w: np.ndarray
    reset_u: np.ndarray
    reset_b: np.ndarray
    cand_w: np.ndarray
    cand_u: np.ndarray
    cand_b: np.ndarray

    def __post_init__(self):
        for name in self.block_names():
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        h, i = self.update_w.shape
        for name in ("update", "reset", "cand"):
            w, u, b = (getattr(self, f"{name}_{s}") for s in ("w", "u", "b"))
            if w.shape != (h, i) or u.shape != (h, h) or b.shape != (h,):
                raise ShapeMismatchError(
                    f"GRU {name} gate shapes {w.shape}/{u.shape}/{b.shape} do not "
                    f"match hidden size {h} and input size {i}"
                )
            if not all(np.all(np.isfinite(a)) for a in (w, u, b)):
                raise ValueError(f"GRU {name} gate parameters must be finite")

    @staticmethod
    def block_names() -> tuple[str, ...]:
        return (
            "update_w", "update_u", "update_b",
            "reset_w", "reset_u", "reset_b",
            "cand_w", "cand_u", "cand_b",
        )

    @property
    def hidden_size(self) -> int:
        return self.update_w.shape[0]

    @property
    def input_size(self) -> int:
        return self.update_w.shape[1]


@dataclass
class GruStepCache:
    """Everything the backward pass needs from one forward step."""

    x: np.ndarray
    h_prev: np.ndarray
    update: np.ndarray
    reset: np.ndarray
    cand: np.ndarray


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def gru_cell_forward(cell: GruCellParams, x_t, h_prev, return_cache: bool = False):
    """Advance the hidden state by one time step.

    Accepts single vectors or batches; returns the new hidden state with the
    same leading shape, plus the step cache when ``return_cache`` is set.
    """
    x = _as_batch(x_t)
    h = _as_batch(h_prev)
    single = np.asarray(x_t).ndim == 1
    if x.shape[1] != cell.input_size:
        raise ShapeMismatchError(
            f"GRU cell expects input size {cell.input_size}, got {x.shape[1]}"
        )
    if h.shape[1] != cell.hidden_size or h.shape[0] != x.shape[0]:
        raise ShapeMismatchError(
            f"GRU hidden state shape {h.shape} does not match input batch "
            f"{x.shape} and hidden size {cell.hidden_size}"
        )
    update = _sigmoid(x @ cell.update_w.T + h @ cell.update_u.T + cell.update_b)
    reset = _sigmoid(x @ cell.reset_w.T + h @ cell.reset_u.T + cell.reset_b)
    cand = np.tanh(x @ cell.cand_w.T + (reset * h) @ cell.cand_u.T + cell.cand_b)
    h_new = (1.0 - update) * h + update * cand
    if single:
        h_new = h_new[0]
    if return_cache:
        return h_new, GruStepCache(x=x, h_prev=h, update=update, reset=reset, cand=cand)
    return h_new


def gru_cell_backward(cell: GruCellParams, cache: GruStepCache, d_h: np.ndarray):
    """Backward pass of one step.

    Given the upstream gradient with respect to h_t, returns
    ``(grads, d_x, d_h_prev)`` where ``grads`` maps block names to gradient
    arrays (accumulated over the batch).
    """
    x, h_prev = cache.x, cache.h_prev
    z, r, c = cache.update, cache.reset, cache.cand

    d_z = d_h * (c - h_prev)
    d_c = d_h * z
    d_h_prev = d_h * (1.0 - z)

    d_a_c = d_c * (1.0 - c**2)  # through tanh
    d_rh = d_a_c @ cell.cand_u
    d_r = d_rh * h_prev
    d_h_prev = d_h_prev + d_rh * r

    d_a_z = d_z * z * (1.0 - z)  # through sigmoid
    d_a_r = d_r * r * (1.0 - r)

    grads = {
        "update_w": d_a_z.T @ x,
        "update_u": d_a_z.T @ h_prev,
        "update_b": d_a_z.sum(axis=0),
        "reset_w": d_a_r.T @ x,
        "reset_u": d_a_r.T @ h_prev,
        "reset_b": d_a_r.sum(axis=0),
        "cand_w": d_a_c.T @ x,
        "cand_u": d_a_c.T @ (r * h_prev),
        "cand_b": d_a_c.sum(axis=0),
    }
    d_x = d_a_z @ cell.update_w + d_a_r @ cell.reset_w + d_a_c @ cell.cand_w
    d_h_prev = d_h_prev + d_a_z @ cell.update_u + d_a_r @ cell.reset_u
    return grads, d_x, d_h_prev
