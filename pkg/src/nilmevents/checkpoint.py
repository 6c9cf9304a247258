"""Versioned, self-describing checkpoint files for trained classifiers.

Plain JSON with named parameter blocks and explicit shapes. Finite float64
values survive the decimal round-trip bit-exactly (shortest-repr encoding),
so reloaded models predict identically to the saved ones.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import CheckpointError
from .models import DenseStateChangeClassifier, GruWindowClassifier

FORMAT_VERSION = 1

_KINDS = {
    "dnn": DenseStateChangeClassifier,
    "rnn": GruWindowClassifier,
}


def _estimator_kind(estimator) -> str:
    for kind, cls in _KINDS.items():
        if isinstance(estimator, cls):
            return kind
    raise CheckpointError(f"cannot checkpoint estimator of type {type(estimator).__name__}")


def save_checkpoint(estimator, path, provenance: dict | None = None) -> None:
    """Serialize a fitted estimator (parameters, running stats, history)."""
    if not hasattr(estimator, "network_"):
        raise CheckpointError("estimator is not fitted; nothing to checkpoint")
    net = estimator.network_
    blocks = {}
    for name, arr in {**net.trainable(), **net.running_stats()}.items():
        blocks[name] = {"shape": list(arr.shape), "values": arr.ravel().tolist()}
    payload = {
        "format_version": FORMAT_VERSION,
        "kind": _estimator_kind(estimator),
        "estimator_params": estimator.get_params(),
        "blocks": blocks,
        "history": [float(v) for v in estimator.history_],
        "n_parameters": int(estimator.n_parameters_),
        "seed": int(estimator.random_state),
        "provenance": provenance or {},
    }
    with open(path, "w", encoding="ascii") as handle:
        json.dump(payload, handle, indent=1)
        handle.write("\n")


def load_checkpoint(path):
    """Rebuild a fitted estimator from a checkpoint file.

    Returns ``(estimator, provenance)``. Raises :class:`CheckpointError` on
    corrupt files, unsupported versions, or inconsistent block shapes.
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="ascii") as handle:
            payload = json.load(handle)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CheckpointError(f"{path}: corrupt checkpoint file ({exc})") from None
    except OSError as exc:
        raise CheckpointError(f"{path}: cannot read checkpoint ({exc})") from None
    if not isinstance(payload, dict) or "format_version" not in payload:
        raise CheckpointError(f"{path}: not a checkpoint file")
    version = payload["format_version"]
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: checkpoint format version {version} is not supported "
            f"(expected {FORMAT_VERSION})"
        )
    try:
        kind = payload["kind"]
        estimator_params = payload["estimator_params"]
        blocks = payload["blocks"]
        history = payload["history"]
        provenance = payload.get("provenance", {})
    except KeyError as exc:
        raise CheckpointError(f"{path}: checkpoint is missing field {exc}") from None
    if kind not in _KINDS:
        raise CheckpointError(f"{path}: unknown model kind {kind!r}")
    estimator = _KINDS[kind](**estimator_params)
    net = estimator._build_network()
    targets = {**net.trainable(), **net.running_stats()}
    if set(blocks) != set(targets):
        missing = sorted(set(targets) ^ set(blocks))
        raise CheckpointError(f"{path}: parameter blocks do not match the config: {missing}")
    for name, arr in targets.items():
        spec = blocks[name]
        values = np.asarray(spec["values"], dtype=np.float64)
        if tuple(spec["shape"]) != arr.shape or values.size != arr.size:
            raise CheckpointError(
                f"{path}: block {name!r} has shape {spec['shape']}, expected {list(arr.shape)}"
            )
        arr[...] = values.reshape(arr.shape)
    estimator.network_ = net
    estimator.history_ = list(history)
    estimator.classes_ = np.array([0, 1])
    estimator.n_features_in_ = estimator._expected_width()
    estimator.n_parameters_ = net.n_parameters()
    return estimator, provenance
