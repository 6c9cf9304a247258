"""Scikit-learn style classifiers wrapping the from-scratch networks.

Both estimators consume non-negative power-change magnitudes:
:class:`DenseStateChangeClassifier` takes one scalar per instance,
:class:`GruWindowClassifier` takes a short window ending at the instance.
Training is plain shuffled mini-batch optimization with the hand-rolled Adam
step; everything is deterministic given ``random_state``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .errors import DatasetError
from .nn import AdamState, FeedForwardNet, GruStackNet, adam_step, nll_loss


def _validate_inputs(X, expected_width: int, name: str) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != expected_width:
        raise DatasetError(
            f"{name} expects {expected_width} column(s) of |delta P| magnitudes, "
            f"got shape {X.shape}"
        )
    if X.size and X.min() < 0:
        raise ValueError(
            f"{name} inputs must be non-negative magnitudes; pass |delta P|, "
            f"not signed deltas"
        )
    return X


def _validate_labels(y) -> np.ndarray:
    y = np.asarray(y)
    classes = np.unique(y)
    if not np.all(np.isin(classes, (0, 1))):
        raise DatasetError(f"labels must be 0/1 state-change indicators, got {classes}")
    if classes.size < 2:
        raise DatasetError(
            "training data contains a single class; both state-change and "
            "no-change samples are required"
        )
    return y.astype(np.int64)


def _fit_network(net, X, y, epochs, batch_size, learning_rate, beta1, beta2, seed, min_batch):
    """Shuffled mini-batch training; returns per-epoch mean loss history."""
    params = net.trainable()
    state = AdamState(learning_rate=learning_rate, beta1=beta1, beta2=beta2)
    shuffle_rng = np.random.default_rng([seed, 1])
    history: list[float] = []
    n = X.shape[0]
    for _ in range(epochs):
        perm = shuffle_rng.permutation(n)
        loss_sum, used = 0.0, 0
        for start in range(0, n, batch_size):
            idx = perm[start : start + batch_size]
            if idx.size < min_batch:
                continue
            probs, trace = net.forward(X[idx], mode="train")
            loss_sum += nll_loss(probs, y[idx])
            grads = net.backward(trace, y[idx])
            adam_step(state, params, grads)
            used += idx.size
        history.append(loss_sum / used if used else float("nan"))
    return history


class _StateChangeClassifierBase(ClassifierMixin, BaseEstimator):
    """Shared fit/predict plumbing; concrete classes build their network."""

    def _expected_width(self) -> int:
        raise NotImplementedError

    def _build_network(self):
        raise NotImplementedError

    def _min_batch(self) -> int:
        return 1

    def fit(self, X, y):
        X = _validate_inputs(X, self._expected_width(), type(self).__name__)
        X, y = check_X_y(X, y)
        y = _validate_labels(y)
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.batch_size < 2:
            raise ValueError("batch_size must be at least 2")
        self.network_ = self._build_network()
        self.history_ = _fit_network(
            self.network_,
            X,
            y,
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            beta1=self.beta1,
            beta2=self.beta2,
            seed=self.random_state,
            min_batch=self._min_batch(),
        )
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        self.n_parameters_ = self.network_.n_parameters()
        return self

    def predict_proba(self, X) -> np.ndarray:
        check_is_fitted(self, "network_")
        X = _validate_inputs(X, self._expected_width(), type(self).__name__)
        probs, _ = self.network_.forward(X, mode="infer")
        return probs

    def predict(self, X) -> np.ndarray:
        return self.classes_[self.predict_proba(X).argmax(axis=1)]


class DenseStateChangeClassifier(_StateChangeClassifierBase):
    """Dense state-change classifier over single |delta P| magnitudes.

    ``depth`` counts dense layers: ``depth - 1`` hidden blocks of
    ``hidden_width`` units (dense + tanh + batch normalization, ordered per
    ``layer_order``) and a dense softmax head. The default geometry
    (18 x 5) has 1244 trainable parameters.

    ``layer_order="dense_norm_tanh"`` (default) normalizes pre-activations so
    raw watt-scale inputs cannot saturate the first tanh;
    ``"dense_tanh_norm"`` activates before normalizing.
    """

    def __init__(
        self,
        hidden_width: int = 18,
        depth: int = 5,
        epochs: int = 100,
        batch_size: int = 64,
        learning_rate: float = 1e-4,
        beta1: float = 0.9,
        beta2: float = 0.999,
        layer_order: str = "dense_norm_tanh",
        random_state: int = 0,
    ):
        self.hidden_width = hidden_width
        self.depth = depth
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.layer_order = layer_order
        self.random_state = random_state

    def _expected_width(self) -> int:
        return 1

    def _build_network(self) -> FeedForwardNet:
        return FeedForwardNet.build(
            input_dim=1,
            hidden_width=self.hidden_width,
            depth=self.depth,
            output_dim=2,
            layer_order=self.layer_order,
            seed=self.random_state,
        )

    def _min_batch(self) -> int:
        return 2  # train-mode batch normalization needs a variance


class GruWindowClassifier(_StateChangeClassifierBase):
    """Stacked-GRU classifier over windows of consecutive |delta P| values.

    The window covers ``window_length`` consecutive minutes and the
    prediction applies to the final minute. Defaults mirror the dense
    model's geometry: same hidden width, four recurrent layers.
    """

    def __init__(
        self,
        window_length: int = 2,
        hidden_width: int = 18,
        n_layers: int = 4,
        epochs: int = 100,
        batch_size: int = 64,
        learning_rate: float = 1e-4,
        beta1: float = 0.9,
        beta2: float = 0.999,
        random_state: int = 0,
    ):
        self.window_length = window_length
        self.hidden_width = hidden_width
        self.n_layers = n_layers
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.random_state = random_state

    def _expected_width(self) -> int:
        return self.window_length

    def _build_network(self) -> GruStackNet:
        return GruStackNet.build(
            window_length=self.window_length,
            hidden_width=self.hidden_width,
            n_layers=self.n_layers,
            input_dim=1,
            output_dim=2,
            seed=self.random_state,
        )
