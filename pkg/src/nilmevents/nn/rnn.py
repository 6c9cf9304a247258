"""Stacked GRU classifier over short windows, with hand-derived BPTT.

The stack unrolls over a fixed window of scalar inputs; the final hidden
state of the top layer feeds a dense softmax head. Gradients flow backward
through both time (hidden-to-hidden) and depth (layer-to-layer).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeMismatchError
from .gru import GruCellParams, GruStepCache, gru_cell_backward, gru_cell_forward
from .layers import (
    DenseLayerParams,
    dense_backward,
    dense_forward,
    nll_loss,
    softmax,
    softmax_nll_backward,
)
from .network import glorot_uniform


@dataclass
class RnnTrace:
    """Step caches (per layer, per time step) plus the head input."""

    step_caches: list[list[GruStepCache]]  # [layer][time]
    head_input: np.ndarray
    probs: np.ndarray
    window_length: int


class GruStackNet:
    """``n_layers`` stacked GRU cells unrolled over ``window_length`` steps."""

    def __init__(self, cells: list[GruCellParams], head: DenseLayerParams, window_length: int):
        if window_length < 2:
            raise ValueError(f"window_length must be at least 2, got {window_length}")
        if not cells:
            raise ValueError("need at least one GRU layer")
        hidden = cells[0].hidden_size
        for i, cell in enumerate(cells[1:], start=2):
            if cell.input_size != hidden or cell.hidden_size != hidden:
                raise ShapeMismatchError(
                    f"GRU layer {i} sizes ({cell.hidden_size}, {cell.input_size}) do not "
                    f"match stack hidden size {hidden}"
                )
        if head.in_dim != hidden:
            raise ShapeMismatchError(
                f"head expects input {head.in_dim} but top GRU layer is {hidden} wide"
            )
        self.cells = cells
        self.head = head
        self.window_length = window_length

    @classmethod
    def build(
        cls,
        window_length: int,
        hidden_width: int,
        n_layers: int = 4,
        input_dim: int = 1,
        output_dim: int = 2,
        seed: int = 0,
    ) -> "GruStackNet":
        if n_layers < 1:
            raise ValueError(f"n_layers must be at least 1, got {n_layers}")
        if hidden_width < 1:
            raise ValueError(f"hidden_width must be at least 1, got {hidden_width}")
        rng = np.random.default_rng(seed)
        cells = []
        for layer in range(n_layers):
            in_size = input_dim if layer == 0 else hidden_width
            gates = {}
            for gate in ("update", "reset", "cand"):
                gates[f"{gate}_w"] = glorot_uniform(rng, hidden_width, in_size)
                gates[f"{gate}_u"] = glorot_uniform(rng, hidden_width, hidden_width)
                gates[f"{gate}_b"] = np.zeros(hidden_width)
            cells.append(GruCellParams(**gates))
        head = DenseLayerParams(
            weights=glorot_uniform(rng, output_dim, hidden_width),
            biases=np.zeros(output_dim),
        )
        return cls(cells=cells, head=head, window_length=window_length)

    @property
    def hidden_width(self) -> int:
        return self.cells[0].hidden_size

    @property
    def n_layers(self) -> int:
        return len(self.cells)

    def trainable(self) -> dict[str, np.ndarray]:
        blocks: dict[str, np.ndarray] = {}
        for i, cell in enumerate(self.cells, start=1):
            for name in GruCellParams.block_names():
                blocks[f"gru{i}.{name}"] = getattr(cell, name)
        blocks["head.weights"] = self.head.weights
        blocks["head.biases"] = self.head.biases
        return blocks

    def n_parameters(self) -> int:
        return sum(int(b.size) for b in self.trainable().values())

    def forward(self, windows, mode: str = "train") -> tuple[np.ndarray, RnnTrace | None]:
        """Classify a batch of windows, shape (n, window_length).

        ``mode`` only controls whether a trace is recorded; the recurrent
        computation itself has no train/infer distinction.
        """
        x = np.asarray(windows, dtype=np.float64)
        if x.ndim == 1:
            x = x[np.newaxis, :]
        if x.ndim != 2 or x.shape[1] != self.window_length:
            raise ShapeMismatchError(
                f"expected windows of length {self.window_length}, got shape {x.shape}"
            )
        n = x.shape[0]
        hidden = [np.zeros((n, self.hidden_width)) for _ in self.cells]
        caches: list[list[GruStepCache]] = [[] for _ in self.cells]
        for t in range(self.window_length):
            step_input = x[:, t : t + 1]
            for layer, cell in enumerate(self.cells):
                hidden[layer], cache = gru_cell_forward(
                    cell, step_input, hidden[layer], return_cache=True
                )
                caches[layer].append(cache)
                step_input = hidden[layer]
        logits = dense_forward(self.head, hidden[-1])
        probs = softmax(logits)
        if mode == "infer":
            return probs, None
        return probs, RnnTrace(
            step_caches=caches,
            head_input=hidden[-1],
            probs=probs,
            window_length=self.window_length,
        )

    def backward(self, trace: RnnTrace, labels) -> dict[str, np.ndarray]:
        """Gradients of the summed NLL through the head and the full unroll."""
        if trace.window_length != self.window_length or len(trace.step_caches) != self.n_layers:
            raise ShapeMismatchError("trace does not match this network's unroll shape")
        grads = {name: np.zeros_like(block) for name, block in self.trainable().items()}
        d_logits = softmax_nll_backward(trace.probs, labels)
        d_w, d_b, d_h_top = dense_backward(self.head, trace.head_input, d_logits)
        grads["head.weights"] += d_w
        grads["head.biases"] += d_b
        d_hidden = [np.zeros_like(d_h_top) for _ in self.cells]
        d_hidden[-1] = d_h_top
        for t in range(self.window_length - 1, -1, -1):
            for layer in range(self.n_layers - 1, -1, -1):
                cell_grads, d_x, d_h_prev = gru_cell_backward(
                    self.cells[layer], trace.step_caches[layer][t], d_hidden[layer]
                )
                for name, g in cell_grads.items():
                    grads[f"gru{layer + 1}.{name}"] += g
                d_hidden[layer] = d_h_prev
                if layer > 0:
                    d_hidden[layer - 1] = d_hidden[layer - 1] + d_x
        return grads

    def loss(self, windows, labels, mode: str = "train") -> float:
        probs, _ = self.forward(windows, mode=mode)
        return nll_loss(probs, labels)

    def loss_and_gradients(self, windows, labels) -> tuple[float, dict[str, np.ndarray]]:
        probs, trace = self.forward(windows, mode="train")
        return nll_loss(probs, labels), self.backward(trace, labels)

    def running_stats(self) -> dict[str, np.ndarray]:
        return {}


def gru_stack_parameter_count(hidden_width: int, n_layers: int, window_length: int = 2,
                              input_dim: int = 1, output_dim: int = 2) -> int:
    """Closed-form trainable-parameter count of :class:`GruStackNet`."""
    h = hidden_width
    first = 3 * (h * input_dim + h * h + h)
    rest = (n_layers - 1) * 3 * (h * h + h * h + h)
    head = output_dim * h + output_dim
    return first + rest + head
