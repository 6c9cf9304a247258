"""End-to-end wiring: house directory -> datasets -> trained model -> scores.

Each appliance gets its own independent model. The aggregate signal is the
per-minute sum of the mains channels; labels come from thresholding the
appliance's own sub-meter deltas at the same 1-minute grid, so inputs and
labels align one-to-one.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .errors import ConfigError, DatasetError
from .evaluation import MetricsRow, confusion
from .labeling import (
    ApplianceExperiment,
    LabeledDataset,
    assemble_dataset,
    assemble_window_dataset,
    augment_positives,
    make_labels,
    split,
)
from .models import DenseStateChangeClassifier, GruWindowClassifier
from .redd import load_house, mains_channels, parse_labels
from .series import PowerSeries, align, delta, resample_1min, sum_series


@dataclass(frozen=True)
class ApplianceData:
    """Train/test datasets for one appliance, plus their provenance."""

    experiment: ApplianceExperiment
    train_raw: LabeledDataset
    train: LabeledDataset  # augmented
    test: LabeledDataset


def resolve_house_dir(data_dir, house: str) -> Path:
    path = Path(data_dir) / house
    if not path.is_dir():
        raise DatasetError(f"house directory {path} does not exist")
    return path


def resolve_mains(house_dir, config: ExperimentConfig) -> tuple[int, ...]:
    if config.mains_channels is not None:
        return config.mains_channels
    labels = parse_labels(Path(house_dir) / "labels.dat")
    mains = mains_channels(labels)
    if not mains:
        raise ConfigError(
            f"{house_dir}: no channels labeled 'mains' and no mains_channels configured"
        )
    return tuple(mains)


def load_aligned_minute_series(
    house_dir, config: ExperimentConfig, experiment: ApplianceExperiment
) -> tuple[PowerSeries, PowerSeries]:
    """(aggregate, appliance) series on a shared 1-minute grid."""
    mains = resolve_mains(house_dir, config)
    channels = load_house(house_dir, channels=sorted(set(mains) | set(experiment.channels)))
    resampled = {c: resample_1min(s) for c, s in channels.items()}
    aggregate = sum_series([resampled[c] for c in mains], appliance_name="aggregate")
    appliance = sum_series(
        [resampled[c] for c in experiment.channels], appliance_name=experiment.appliance
    )
    return align(aggregate, appliance)


def prepare_appliance_data(
    house_dir,
    config: ExperimentConfig,
    appliance: str,
    model: str = "dnn",
    window_length: int = 2,
) -> ApplianceData:
    """Run label -> assemble -> split -> augment for one appliance."""
    experiment = config.experiment(appliance)
    aggregate, sub_meter = load_aligned_minute_series(house_dir, config, experiment)
    aggregate_deltas = delta(aggregate)
    appliance_deltas = delta(sub_meter)
    labels = make_labels(appliance_deltas, experiment.threshold_watts)
    if model == "dnn":
        dataset = assemble_dataset(aggregate_deltas, labels)
    elif model == "rnn":
        dataset = assemble_window_dataset(aggregate_deltas, labels, window_length)
    else:
        raise ConfigError(f"model must be 'dnn' or 'rnn', got {model!r}")
    train_raw, test = split(dataset, experiment.training_samples)
    train = augment_positives(train_raw, alpha=experiment.alpha, seed=config.seed)
    return ApplianceData(experiment=experiment, train_raw=train_raw, train=train, test=test)


def build_estimator(config: ExperimentConfig, model: str = "dnn", window_length: int = 2):
    settings = config.model
    if model == "dnn":
        return DenseStateChangeClassifier(
            hidden_width=settings.hidden_width,
            depth=settings.depth,
            epochs=settings.epochs,
            batch_size=settings.batch_size,
            learning_rate=settings.learning_rate,
            beta1=settings.beta1,
            beta2=settings.beta2,
            layer_order=settings.layer_order,
            random_state=config.seed,
        )
    if model == "rnn":
        return GruWindowClassifier(
            window_length=window_length,
            hidden_width=settings.hidden_width,
            n_layers=settings.rnn_layers,
            epochs=settings.epochs,
            batch_size=settings.batch_size,
            learning_rate=settings.learning_rate,
            beta1=settings.beta1,
            beta2=settings.beta2,
            random_state=config.seed,
        )
    raise ConfigError(f"model must be 'dnn' or 'rnn', got {model!r}")


def model_display_name(model: str, window_length: int = 2) -> str:
    return "dnn" if model == "dnn" else f"rnn_{window_length}"


def train_appliance(
    house_dir,
    config: ExperimentConfig,
    appliance: str,
    model: str = "dnn",
    window_length: int = 2,
):
    """Train one appliance model; returns (estimator, data)."""
    data = prepare_appliance_data(house_dir, config, appliance, model, window_length)
    estimator = build_estimator(config, model, window_length)
    X = data.train.x.reshape(-1, 1) if model == "dnn" else data.train.x
    estimator.fit(X, data.train.labels)
    return estimator, data


def evaluate_appliance(
    estimator, test: LabeledDataset, experiment: ApplianceExperiment, model_name: str
) -> MetricsRow:
    """Score a trained model on the held-out split (never augmented)."""
    if len(test) == 0:
        raise DatasetError("test split is empty")
    X = test.x.reshape(-1, 1) if test.x.ndim == 1 else test.x
    predictions = estimator.predict(X)
    counts = confusion(predictions, test.labels)
    return MetricsRow.from_counts(
        house=experiment.house,
        appliance=experiment.appliance,
        model=model_name,
        counts=counts,
    )


def aggregate_minute_count(house_dir, config: ExperimentConfig) -> int:
    """1-minute sample count of the aggregate (mains sum) for one house."""
    mains = resolve_mains(house_dir, config)
    channels = load_house(house_dir, channels=list(mains))
    resampled = [resample_1min(s) for s in channels.values()]
    return len(sum_series(resampled))
