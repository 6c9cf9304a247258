"""Experiment configuration: YAML schema, validation, shipped defaults."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from importlib.resources import files
from pathlib import Path

import yaml

from .errors import ConfigError
from .labeling import ApplianceExperiment

# Published 1-minute aggregate sample totals for the three evaluated houses;
# ingest prints how close a local resample lands (±2% is expected noise from
# the unstated original resampling procedure).
PUBLISHED_SAMPLE_TOTALS = {"house_1": 25946, "house_2": 19856, "house_6": 17605}
INGEST_TOLERANCE = 0.02

PACKAGED_CONFIGS = ("house1", "house2", "house6", "synth_reference")


@dataclass(frozen=True)
class ModelSettings:
    """Network geometry and training hyperparameters shared by the pipeline."""

    hidden_width: int = 18
    depth: int = 5
    epochs: int = 100
    batch_size: int = 64
    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    layer_order: str = "dense_norm_tanh"
    rnn_layers: int = 4


@dataclass(frozen=True)
class ExperimentConfig:
    """One house's experiment: channels, thresholds, budgets, model settings."""

    house: str
    appliances: dict[str, ApplianceExperiment]
    seed: int = 7
    alpha: float = 0.125
    mains_channels: tuple[int, ...] | None = None  # None: use channels labeled "mains"
    model: ModelSettings = field(default_factory=ModelSettings)

    def experiment(self, appliance: str) -> ApplianceExperiment:
        try:
            return self.appliances[appliance]
        except KeyError:
            raise ConfigError(
                f"unknown appliance {appliance!r}; configured appliances: "
                f"{', '.join(sorted(self.appliances))}"
            ) from None


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigError(f"{context}: missing required key {key!r}")
    return mapping[key]


def parse_config(data: dict, source: str = "<config>") -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    house = str(_require(data, "house", source))
    seed = int(data.get("seed", 7))
    alpha = float(data.get("alpha", 0.125))
    mains = data.get("mains_channels")
    if mains is not None:
        mains = tuple(int(c) for c in mains)
    model_data = data.get("model", {})
    if not isinstance(model_data, dict):
        raise ConfigError(f"{source}: 'model' must be a mapping")
    try:
        model = ModelSettings(**model_data)
    except TypeError as exc:
        raise ConfigError(f"{source}: invalid model settings ({exc})") from None
    appliances_data = _require(data, "appliances", source)
    if not isinstance(appliances_data, dict) or not appliances_data:
        raise ConfigError(f"{source}: 'appliances' must be a non-empty mapping")
    appliances = {}
    for name, spec in appliances_data.items():
        context = f"{source}: appliance {name!r}"
        if not isinstance(spec, dict):
            raise ConfigError(f"{context}: must be a mapping")
        channels = tuple(int(c) for c in _require(spec, "channels", context))
        if not channels:
            raise ConfigError(f"{context}: needs at least one channel")
        try:
            appliances[str(name)] = ApplianceExperiment(
                house=house,
                appliance=str(name),
                threshold_watts=float(_require(spec, "threshold_watts", context)),
                training_samples=int(_require(spec, "training_samples", context)),
                alpha=float(spec.get("alpha", alpha)),
                channels=channels,
            )
        except ValueError as exc:
            raise ConfigError(f"{context}: {exc}") from None
    return ExperimentConfig(
        house=house,
        appliances=appliances,
        seed=seed,
        alpha=alpha,
        mains_channels=mains,
        model=model,
    )


def load_config(path) -> ExperimentConfig:
    """Load and validate an experiment config file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from None
    return parse_config(data, source=str(path))


def packaged_config(name: str) -> ExperimentConfig:
    """One of the shipped experiment configs (see ``PACKAGED_CONFIGS``)."""
    if name not in PACKAGED_CONFIGS:
        raise ConfigError(
            f"unknown packaged config {name!r}; available: {', '.join(PACKAGED_CONFIGS)}"
        )
    text = files("nilmevents").joinpath(f"resources/{name}.yaml").read_text(encoding="utf-8")
    return parse_config(yaml.safe_load(text), source=f"packaged:{name}")


def override_model(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Copy of the config with model settings replaced (CLI flag overrides)."""
    filtered = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, model=replace(config.model, **filtered))


def override_run(
    config: ExperimentConfig,
    seed: int | None = None,
    alpha: float | None = None,
    house: str | None = None,
) -> ExperimentConfig:
    """Copy of the config with seed/alpha/house overridden where given."""
    out = config
    if house is not None:
        out = replace(
            out,
            house=house,
            appliances={k: replace(v, house=house) for k, v in out.appliances.items()},
        )
    if seed is not None:
        out = replace(out, seed=seed)
    if alpha is not None:
        out = replace(
            out,
            alpha=alpha,
            appliances={k: replace(v, alpha=alpha) for k, v in out.appliances.items()},
        )
    return out


def config_to_dict(config: ExperimentConfig) -> dict:
    """Plain-dict form of a config (the YAML schema), for provenance records."""
    return {
        "house": config.house,
        "seed": config.seed,
        "alpha": config.alpha,
        "mains_channels": list(config.mains_channels) if config.mains_channels else None,
        "model": {
            "hidden_width": config.model.hidden_width,
            "depth": config.model.depth,
            "epochs": config.model.epochs,
            "batch_size": config.model.batch_size,
            "learning_rate": config.model.learning_rate,
            "beta1": config.model.beta1,
            "beta2": config.model.beta2,
            "layer_order": config.model.layer_order,
            "rnn_layers": config.model.rnn_layers,
        },
        "appliances": {
            name: {
                "channels": list(exp.channels),
                "threshold_watts": exp.threshold_watts,
                "training_samples": exp.training_samples,
                "alpha": exp.alpha,
            }
            for name, exp in config.appliances.items()
        },
    }
