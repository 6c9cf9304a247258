"""Elementary network layers with hand-derived forward and backward passes.

All functions operate on float64 arrays with batch-first shapes
``(n_samples, n_features)`` and are pure apart from the documented
running-statistics update in train-mode batch normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeMismatchError

PROB_FLOOR = 1e-12  # keeps the log-likelihood finite when a probability underflows to 0


def _as_batch(x) -> np.ndarray:
    """Coerce a vector or batch to a 2-D float64 batch."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ShapeMismatchError(f"expected a vector or a 2-D batch, got shape {arr.shape}")
    return arr


@dataclass
class DenseLayerParams:
    """Weights and biases of one fully connected layer.

    ``weights`` has shape (out_dim, in_dim); ``biases`` has shape (out_dim,).
    """

    weights: np.ndarray
    biases: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.biases = np.asarray(self.biases, dtype=np.float64)
        if self.weights.ndim != 2 or self.biases.ndim != 1:
            raise ShapeMismatchError(
                f"dense layer needs 2-D weights and 1-D biases, got "
                f"{self.weights.shape} and {self.biases.shape}"
            )
        if self.weights.shape[0] != self.biases.shape[0]:
            raise ShapeMismatchError(
                f"dense layer weights {self.weights.shape} do not match "
                f"biases {self.biases.shape}"
            )
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.biases))):
            raise ValueError("dense layer parameters must be finite")

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]


@dataclass
class BatchNormParams:
    """Learnable scale/shift plus running statistics for one normalized layer."""

    gamma: np.ndarray
    beta: np.ndarray
    running_mean: np.ndarray = None
    running_var: np.ndarray = None
    epsilon: float = 1e-5
    decay: float = 0.9

    def __post_init__(self):
        self.gamma = np.asarray(self.gamma, dtype=np.float64)
        self.beta = np.asarray(self.beta, dtype=np.float64)
        if self.running_mean is None:
            self.running_mean = np.zeros_like(self.gamma)
        if self.running_var is None:
            self.running_var = np.ones_like(self.gamma)
        self.running_mean = np.asarray(self.running_mean, dtype=np.float64)
        self.running_var = np.asarray(self.running_var, dtype=np.float64)
        shapes = {a.shape for a in (self.gamma, self.beta, self.running_mean, self.running_var)}
        if len(shapes) != 1 or self.gamma.ndim != 1:
            raise ShapeMismatchError(
                "batch-norm gamma/beta/running statistics must all be 1-D of equal length"
            )
        if self.epsilon <= 0:
            raise ValueError("batch-norm epsilon must be positive")
        if not 0.0 < self.decay < 1.0:
            raise ValueError("batch-norm decay must lie in (0, 1)")
        if np.any(self.running_var < 0):
            raise ValueError("running variance must be non-negative")

    @property
    def width(self) -> int:
        return self.gamma.shape[0]


@dataclass
class BatchNormStats:
    """Batch statistics cached by a train-mode forward pass."""

    mean: np.ndarray
    var: np.ndarray
    inv_std: np.ndarray
    normalized: np.ndarray  # (x - mean) * inv_std, before the gamma/beta affine


def dense_forward(layer: DenseLayerParams, x, layer_index: int | None = None) -> np.ndarray:
    """Apply ``W x + b`` to every row of the batch."""
    x = _as_batch(x)
    if x.shape[1] != layer.in_dim:
        where = f"dense layer {layer_index}" if layer_index is not None else "dense layer"
        raise ShapeMismatchError(
            f"{where}: input has {x.shape[1]} features but weights are "
            f"{layer.weights.shape} (expected {layer.in_dim} features)"
        )
    return x @ layer.weights.T + layer.biases


def dense_backward(layer: DenseLayerParams, x: np.ndarray, d_out: np.ndarray):
    """Gradients of a summed loss through a dense layer.

    Returns (d_weights, d_biases, d_x) for upstream gradient ``d_out``.
    """
    d_weights = d_out.T @ x
    d_biases = d_out.sum(axis=0)
    d_x = d_out @ layer.weights
    return d_weights, d_biases, d_x


def tanh_forward(x) -> np.ndarray:
    """Elementwise hyperbolic tangent."""
    return np.tanh(np.asarray(x, dtype=np.float64))


def tanh_backward(activation: np.ndarray, d_out: np.ndarray) -> np.ndarray:
    """Backward pass given the forward *output* (tanh' = 1 - tanh^2)."""
    return d_out * (1.0 - activation**2)


def batchnorm_forward(params: BatchNormParams, x, mode: str = "train"):
    """Normalize a batch per unit, then apply the learnable affine.

    Train mode standardizes with batch statistics (batch size >= 2 required,
    variance is undefined otherwise) and updates the running statistics in
    place by exponential decay. Infer mode standardizes with the running
    statistics, touches no state, and accepts any batch size >= 1.

    Returns ``(output, stats)`` where ``stats`` is a :class:`BatchNormStats`
    cache in train mode and ``None`` in infer mode.
    """
    x = _as_batch(x)
    if x.shape[1] != params.width:
        raise ShapeMismatchError(
            f"batch-norm over {params.width} units got input with {x.shape[1]} features"
        )
    if mode == "train":
        if x.shape[0] < 2:
            raise ValueError(
                f"train-mode batch normalization needs a batch of at least 2 samples, "
                f"got {x.shape[0]}"
            )
        mean = x.mean(axis=0)
        var = x.var(axis=0)
        inv_std = 1.0 / np.sqrt(var + params.epsilon)
        normalized = (x - mean) * inv_std
        params.running_mean *= params.decay
        params.running_mean += (1.0 - params.decay) * mean
        params.running_var *= params.decay
        params.running_var += (1.0 - params.decay) * var
        out = params.gamma * normalized + params.beta
        return out, BatchNormStats(mean=mean, var=var, inv_std=inv_std, normalized=normalized)
    if mode == "infer":
        inv_std = 1.0 / np.sqrt(params.running_var + params.epsilon)
        normalized = (x - params.running_mean) * inv_std
        return params.gamma * normalized + params.beta, None
    raise ValueError(f"mode must be 'train' or 'infer', got {mode!r}")


def batchnorm_backward(params: BatchNormParams, stats: BatchNormStats, d_out: np.ndarray):
    """Gradients of a summed loss through train-mode batch normalization.

    Returns (d_gamma, d_beta, d_x). Uses the compact closed form obtained by
    differentiating through the batch mean and variance.
    """
    n = d_out.shape[0]
    d_gamma = (d_out * stats.normalized).sum(axis=0)
    d_beta = d_out.sum(axis=0)
    d_norm = d_out * params.gamma
    d_x = (
        stats.inv_std
        / n
        * (
            n * d_norm
            - d_norm.sum(axis=0)
            - stats.normalized * (d_norm * stats.normalized).sum(axis=0)
        )
    )
    return d_gamma, d_beta, d_x


def softmax(x) -> np.ndarray:
    """Row-wise softmax, stabilized by max subtraction."""
    x = _as_batch(x)
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def nll_loss(probs, labels) -> float:
    """Summed negative log-likelihood of the true labels.

    Probabilities below ``PROB_FLOOR`` are clamped so the result is finite.
    """
    probs = _as_batch(probs)
    labels = np.asarray(labels, dtype=np.intp).ravel()
    if labels.shape[0] != probs.shape[0]:
        raise ShapeMismatchError(
            f"{probs.shape[0]} probability rows but {labels.shape[0]} labels"
        )
    if labels.size and (labels.min() < 0 or labels.max() >= probs.shape[1]):
        raise ValueError(f"labels must lie in [0, {probs.shape[1] - 1}]")
    picked = probs[np.arange(probs.shape[0]), labels]
    return float(-np.log(np.maximum(picked, PROB_FLOOR)).sum())


def softmax_nll_backward(probs: np.ndarray, labels) -> np.ndarray:
    """Gradient of the summed NLL with respect to the softmax *logits*.

    The combined softmax+NLL gradient is ``p - onehot(label)`` per row.
    """
    labels = np.asarray(labels, dtype=np.intp).ravel()
    grad = probs.copy()
    grad[np.arange(grad.shape[0]), labels] -= 1.0
    return grad
