"""State-change labeling, dataset assembly, splitting and augmentation.

A time instance is a positive sample for an appliance when the magnitude of
the appliance's own minute-to-minute power change reaches its threshold. The
classifier's input for that instance is the magnitude of the *aggregate*
change at the same minute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DatasetError
from .series import DeltaSeries, PowerSeries


@dataclass(frozen=True)
class ApplianceExperiment:
    """One row of an experiment table: what to train for one appliance."""

    house: str
    appliance: str
    threshold_watts: float
    training_samples: int
    alpha: float = 0.125
    channels: tuple[int, ...] = ()

    def __post_init__(self):
        if self.threshold_watts <= 0:
            raise ValueError(f"threshold must be positive, got {self.threshold_watts}")
        if self.training_samples <= 0:
            raise ValueError(f"training_samples must be positive, got {self.training_samples}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class LabeledDataset:
    """Per-instance pairs of input magnitude(s) and state-change label.

    ``x`` is ``(n,)`` for single-instance inputs or ``(n, w)`` for window
    inputs; every entry is a non-negative magnitude. ``labels`` are 0/1.
    """

    x: np.ndarray
    labels: np.ndarray
    timestamps: np.ndarray
    augmented: bool = False
    seed: int | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        ts = np.asarray(self.timestamps, dtype=np.int64)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "timestamps", ts)
        if x.shape[0] != labels.shape[0] or labels.shape != ts.shape:
            raise DatasetError(
                f"inconsistent dataset lengths: x {x.shape}, labels {labels.shape}, "
                f"timestamps {ts.shape}"
            )
        if labels.size and not np.all((labels == 0) | (labels == 1)):
            raise DatasetError("labels must be 0 or 1")
        if x.size and np.any(x < 0):
            raise DatasetError("inputs must be non-negative magnitudes")

    def __len__(self) -> int:
        return int(self.labels.size)

    @property
    def n_pos(self) -> int:
        return int(self.labels.sum())

    @property
    def n_neg(self) -> int:
        return len(self) - self.n_pos


def make_labels(appliance_deltas: DeltaSeries, threshold_watts: float) -> np.ndarray:
    """1 where the appliance's |delta| reaches the threshold, else 0."""
    if threshold_watts <= 0:
        raise ValueError(f"threshold must be positive, got {threshold_watts}")
    return (np.abs(appliance_deltas.deltas) >= threshold_watts).astype(np.int64)


def assemble_dataset(aggregate_deltas: DeltaSeries, labels: np.ndarray) -> LabeledDataset:
    """Pair |aggregate delta| inputs with the appliance labels, minute by minute."""
    labels = np.asarray(labels)
    if len(aggregate_deltas) != labels.shape[0]:
        raise DatasetError(
            f"{len(aggregate_deltas)} aggregate deltas but {labels.shape[0]} labels"
        )
    return LabeledDataset(
        x=np.abs(aggregate_deltas.deltas),
        labels=labels,
        timestamps=aggregate_deltas.timestamps,
    )


def assemble_window_dataset(
    aggregate_deltas: DeltaSeries, labels: np.ndarray, window_length: int, step: int = 60
) -> LabeledDataset:
    """Window variant: each sample is the last ``window_length`` |delta| values.

    Windows never span a segment boundary; each window is labeled and
    timestamped by its final instance.
    """
    if window_length < 2:
        raise ValueError(f"window_length must be at least 2, got {window_length}")
    labels = np.asarray(labels)
    if len(aggregate_deltas) != labels.shape[0]:
        raise DatasetError(
            f"{len(aggregate_deltas)} aggregate deltas but {labels.shape[0]} labels"
        )
    magnitudes = np.abs(aggregate_deltas.deltas)
    ts = aggregate_deltas.timestamps
    rows, row_labels, row_ts = [], [], []
    for end in range(window_length - 1, len(magnitudes)):
        start = end - window_length + 1
        span = ts[start : end + 1]
        if span.size and np.all(np.diff(span) == step):
            rows.append(magnitudes[start : end + 1])
            row_labels.append(labels[end])
            row_ts.append(ts[end])
    x = np.asarray(rows) if rows else np.empty((0, window_length))
    return LabeledDataset(
        x=x,
        labels=np.asarray(row_labels, dtype=np.int64),
        timestamps=np.asarray(row_ts, dtype=np.int64),
    )


def split(dataset: LabeledDataset, training_samples: int) -> tuple[LabeledDataset, LabeledDataset]:
    """Contiguous prefix for training, the untouched remainder for testing."""
    if not 0 < training_samples < len(dataset):
        raise DatasetError(
            f"training_samples must lie strictly between 0 and {len(dataset)}, "
            f"got {training_samples}"
        )
    head = LabeledDataset(
        x=dataset.x[:training_samples],
        labels=dataset.labels[:training_samples],
        timestamps=dataset.timestamps[:training_samples],
    )
    tail = LabeledDataset(
        x=dataset.x[training_samples:],
        labels=dataset.labels[training_samples:],
        timestamps=dataset.timestamps[training_samples:],
    )
    return head, tail


def positive_duplication_factor(n_pos: int, n_neg: int, alpha: float) -> int:
    """Extra copies per positive: round-half-up of (n_neg / n_pos) * alpha, min 1."""
    eta = n_neg / n_pos
    return max(1, int(math.floor(eta * alpha + 0.5)))


def augment_positives(train: LabeledDataset, alpha: float, seed: int) -> LabeledDataset:
    """Balance classes by re-inserting copies of every positive sample.

    Each positive gains ``positive_duplication_factor`` extra copies at
    uniformly random positions; negatives are untouched in content and
    multiplicity. Deterministic for a given seed.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if train.n_pos == 0:
        raise DatasetError("no positive samples; cannot train this appliance")
    sigma = positive_duplication_factor(train.n_pos, train.n_neg, alpha)
    pos_idx = np.flatnonzero(train.labels == 1)
    n = len(train)
    rng = np.random.default_rng(seed)
    copies = rng.permutation(np.tile(pos_idx, sigma))
    total = n + copies.size
    # scatter the copies over uniform random slots; the original sequence
    # fills the remaining slots in order
    copy_slots = rng.choice(total, size=copies.size, replace=False)
    source = np.empty(total, dtype=np.int64)
    is_copy = np.zeros(total, dtype=bool)
    is_copy[copy_slots] = True
    source[copy_slots] = copies
    source[~is_copy] = np.arange(n, dtype=np.int64)
    return LabeledDataset(
        x=train.x[source],
        labels=train.labels[source],
        timestamps=train.timestamps[source],
        augmented=True,
        seed=seed,
    )


def estimate_threshold(appliance_series: PowerSeries, num_states: int = 2, seed: int = 0) -> float:
    """Advisory threshold: half the smallest gap between clustered power levels.

    Clusters the readings into ``num_states`` one-dimensional k-means clusters
    (50 seeded restarts) and returns half the minimum distance between
    adjacent sorted cluster means. Shipped experiment thresholds take
    precedence; this helps when configuring a new appliance.
    """
    from sklearn.cluster import KMeans

    if num_states < 2:
        raise ValueError(f"num_states must be at least 2, got {num_states}")
    if len(appliance_series) < num_states:
        raise DatasetError(
            f"series has {len(appliance_series)} samples, need at least {num_states}"
        )
    values = appliance_series.watts
    if float(values.min()) == float(values.max()):
        raise DatasetError(
            "series is constant; cluster gaps are undefined - set the threshold manually"
        )
    km = KMeans(n_clusters=num_states, n_init=50, random_state=seed)
    km.fit(values.reshape(-1, 1))
    means = np.sort(km.cluster_centers_.ravel())
    gaps = np.diff(means)
    smallest = float(gaps.min())
    if smallest == 0.0:
        raise DatasetError(
            "adjacent cluster means coincide; reduce num_states or set the threshold manually"
        )
    return smallest / 2.0
