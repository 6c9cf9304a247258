"""Feedforward classifier assembly: init, traced forward, full backward.

The network maps a small input vector to a probability pair through
``depth - 1`` hidden blocks of equal width followed by a dense head and
softmax. Each hidden block combines a dense layer, a tanh activation and
batch normalization; the order of the activation and the normalization
within a block is configurable (see ``LAYER_ORDERS``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeMismatchError
from .layers import (
    BatchNormParams,
    BatchNormStats,
    DenseLayerParams,
    batchnorm_backward,
    batchnorm_forward,
    dense_backward,
    dense_forward,
    nll_loss,
    softmax,
    softmax_nll_backward,
    tanh_backward,
    tanh_forward,
)

# "dense_norm_tanh" normalizes the dense pre-activations before the tanh, so
# raw-watt inputs of any scale reach the activation standardized and no unit
# saturates at initialization. "dense_tanh_norm" activates first and
# normalizes the activations instead.
LAYER_ORDERS = ("dense_norm_tanh", "dense_tanh_norm")


def glorot_uniform(rng: np.random.Generator, out_dim: int, in_dim: int) -> np.ndarray:
    """Symmetric uniform init with limit sqrt(6 / (fan_in + fan_out))."""
    limit = np.sqrt(6.0 / (in_dim + out_dim))
    return rng.uniform(-limit, limit, size=(out_dim, in_dim))


@dataclass
class ForwardTrace:
    """Per-layer intermediates of one train-mode forward pass."""

    mode: str
    block_inputs: list[np.ndarray]
    dense_outs: list[np.ndarray]
    norm_stats: list[BatchNormStats | None]
    tanh_outs: list[np.ndarray]
    block_outs: list[np.ndarray]
    head_input: np.ndarray
    probs: np.ndarray

    @property
    def depth(self) -> int:
        return len(self.block_inputs) + 1


class FeedForwardNet:
    """Hidden blocks (dense/tanh/batch-norm) plus a dense softmax head."""

    def __init__(
        self,
        dense: list[DenseLayerParams],
        norms: list[BatchNormParams],
        layer_order: str = "dense_norm_tanh",
    ):
        if layer_order not in LAYER_ORDERS:
            raise ValueError(f"layer_order must be one of {LAYER_ORDERS}, got {layer_order!r}")
        if len(dense) != len(norms) + 1:
            raise ShapeMismatchError(
                f"{len(dense)} dense layers need {len(dense) - 1} norm layers, got {len(norms)}"
            )
        for i, (d, nrm) in enumerate(zip(dense[:-1], norms), start=1):
            if nrm.width != d.out_dim:
                raise ShapeMismatchError(
                    f"norm layer {i} width {nrm.width} does not match dense layer "
                    f"{i} output {d.out_dim}"
                )
        self.dense = dense
        self.norms = norms
        self.layer_order = layer_order

    @classmethod
    def build(
        cls,
        input_dim: int,
        hidden_width: int,
        depth: int,
        output_dim: int = 2,
        layer_order: str = "dense_norm_tanh",
        seed: int = 0,
    ) -> "FeedForwardNet":
        """Initialize a fresh network: Glorot weights, zero biases, unit scales."""
        if depth < 2:
            raise ValueError(f"depth must be at least 2, got {depth}")
        if hidden_width < 1:
            raise ValueError(f"hidden_width must be at least 1, got {hidden_width}")
        rng = np.random.default_rng(seed)
        widths = [input_dim] + [hidden_width] * (depth - 1) + [output_dim]
        dense = [
            DenseLayerParams(
                weights=glorot_uniform(rng, widths[i + 1], widths[i]),
                biases=np.zeros(widths[i + 1]),
            )
            for i in range(depth)
        ]
        norms = [
            BatchNormParams(gamma=np.ones(hidden_width), beta=np.zeros(hidden_width))
            for _ in range(depth - 1)
        ]
        return cls(dense=dense, norms=norms, layer_order=layer_order)

    @property
    def depth(self) -> int:
        return len(self.dense)

    @property
    def input_dim(self) -> int:
        return self.dense[0].in_dim

    @property
    def output_dim(self) -> int:
        return self.dense[-1].out_dim

    def trainable(self) -> dict[str, np.ndarray]:
        """Views of every trainable block, keyed by a stable name."""
        blocks: dict[str, np.ndarray] = {}
        for i, layer in enumerate(self.dense, start=1):
            blocks[f"dense{i}.weights"] = layer.weights
            blocks[f"dense{i}.biases"] = layer.biases
        for i, nrm in enumerate(self.norms, start=1):
            blocks[f"norm{i}.gamma"] = nrm.gamma
            blocks[f"norm{i}.beta"] = nrm.beta
        return blocks

    def n_parameters(self) -> int:
        return sum(int(b.size) for b in self.trainable().values())

    def forward(self, x, mode: str = "train") -> tuple[np.ndarray, ForwardTrace | None]:
        """Run the network over a batch; returns (probabilities, trace).

        Train mode records a full trace for :meth:`backward` and updates the
        batch-norm running statistics; infer mode uses the running statistics
        and returns ``(probs, None)``.
        """
        if mode not in ("train", "infer"):
            raise ValueError(f"mode must be 'train' or 'infer', got {mode!r}")
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, np.newaxis] if self.input_dim == 1 else x[np.newaxis, :]
        block_inputs, dense_outs, norm_stats, tanh_outs, block_outs = [], [], [], [], []
        out = x
        for i in range(self.depth - 1):
            block_inputs.append(out)
            z = dense_forward(self.dense[i], out, layer_index=i + 1)
            dense_outs.append(z)
            if self.layer_order == "dense_norm_tanh":
                normed, stats = batchnorm_forward(self.norms[i], z, mode)
                a = tanh_forward(normed)
                tanh_outs.append(a)
                out = a
            else:
                a = tanh_forward(z)
                tanh_outs.append(a)
                out, stats = batchnorm_forward(self.norms[i], a, mode)
            norm_stats.append(stats)
            block_outs.append(out)
        logits = dense_forward(self.dense[-1], out, layer_index=self.depth)
        probs = softmax(logits)
        if mode == "infer":
            return probs, None
        trace = ForwardTrace(
            mode=mode,
            block_inputs=block_inputs,
            dense_outs=dense_outs,
            norm_stats=norm_stats,
            tanh_outs=tanh_outs,
            block_outs=block_outs,
            head_input=out,
            probs=probs,
        )
        return probs, trace

    def backward(self, trace: ForwardTrace, labels) -> dict[str, np.ndarray]:
        """Gradients of the summed NLL loss for every trainable block."""
        if trace.mode != "train":
            raise ValueError("backward needs a trace from a train-mode forward pass")
        if trace.depth != self.depth or trace.head_input.shape[1] != self.dense[-1].in_dim:
            raise ShapeMismatchError(
                f"trace (depth {trace.depth}) does not match this network (depth {self.depth})"
            )
        grads: dict[str, np.ndarray] = {}
        d_logits = softmax_nll_backward(trace.probs, labels)
        d_w, d_b, d_out = dense_backward(self.dense[-1], trace.head_input, d_logits)
        grads[f"dense{self.depth}.weights"] = d_w
        grads[f"dense{self.depth}.biases"] = d_b
        for i in range(self.depth - 2, -1, -1):
            stats = trace.norm_stats[i]
            if self.layer_order == "dense_norm_tanh":
                d_normed = tanh_backward(trace.tanh_outs[i], d_out)
                d_gamma, d_beta, d_z = batchnorm_backward(self.norms[i], stats, d_normed)
            else:
                d_gamma, d_beta, d_tanh = batchnorm_backward(self.norms[i], stats, d_out)
                d_z = tanh_backward(trace.tanh_outs[i], d_tanh)
            grads[f"norm{i + 1}.gamma"] = d_gamma
            grads[f"norm{i + 1}.beta"] = d_beta
            d_w, d_b, d_out = dense_backward(self.dense[i], trace.block_inputs[i], d_z)
            grads[f"dense{i + 1}.weights"] = d_w
            grads[f"dense{i + 1}.biases"] = d_b
        return grads

    def loss(self, x, labels, mode: str = "train") -> float:
        """Summed NLL of one forward pass (no gradients)."""
        probs, _ = self.forward(x, mode=mode)
        return nll_loss(probs, labels)

    def loss_and_gradients(self, x, labels) -> tuple[float, dict[str, np.ndarray]]:
        probs, trace = self.forward(x, mode="train")
        return nll_loss(probs, labels), self.backward(trace, labels)

    def running_stats(self) -> dict[str, np.ndarray]:
        """Views of the non-trainable batch-norm running statistics."""
        stats: dict[str, np.ndarray] = {}
        for i, nrm in enumerate(self.norms, start=1):
            stats[f"norm{i}.running_mean"] = nrm.running_mean
            stats[f"norm{i}.running_var"] = nrm.running_var
        return stats


def feedforward_parameter_count(hidden_width: int, depth: int, input_dim: int = 1,
                                output_dim: int = 2) -> int:
    """Closed-form trainable-parameter count of :class:`FeedForwardNet`."""
    h, d = hidden_width, depth
    first = h * input_dim + h
    middle = (d - 2) * (h * h + h)
    norms = (d - 1) * 2 * h
    head = output_dim * h + output_dim
    return first + middle + norms + head
