"""Per-appliance operational state-change detection from one aggregate meter.

The package covers the full pipeline: house-directory ingestion and 1-minute
resampling, power-delta labeling against per-appliance thresholds,
class-imbalance augmentation, a from-scratch dense classifier and GRU-window
baseline with verified gradients, precision/recall/F-measure evaluation, and
a synthetic household generator for dataset-free end-to-end runs.
"""

from .checkpoint import load_checkpoint, save_checkpoint
from .config import ExperimentConfig, ModelSettings, load_config, packaged_config
from .errors import (
    CheckpointError,
    ConfigError,
    DataFormatError,
    DatasetError,
    NilmEventsError,
    ShapeMismatchError,
)
from .evaluation import (
    ClassificationScores,
    ConfusionCounts,
    MetricsRow,
    confusion,
    metrics,
    published_reference,
    render_csv,
    render_table,
)
from .labeling import (
    ApplianceExperiment,
    LabeledDataset,
    assemble_dataset,
    assemble_window_dataset,
    augment_positives,
    estimate_threshold,
    make_labels,
    split,
)
from .models import DenseStateChangeClassifier, GruWindowClassifier
from .pipeline import evaluate_appliance, prepare_appliance_data, train_appliance
from .redd import parse_labels, parse_redd_channel
from .series import DeltaSeries, PowerSeries, delta, resample_1min
from .synth import (
    ApplianceSpec,
    GeneratedHouse,
    SyntheticHouse,
    generate_house,
    reference_scenario,
    write_synthetic_house,
)

__version__ = "0.1.0"

__all__ = [
    "load_checkpoint",
    "save_checkpoint",
    "ExperimentConfig",
    "ModelSettings",
    "load_config",
    "packaged_config",
    "CheckpointError",
    "ConfigError",
    "DataFormatError",
    "DatasetError",
    "NilmEventsError",
    "ShapeMismatchError",
    "ClassificationScores",
    "ConfusionCounts",
    "MetricsRow",
    "confusion",
    "metrics",
    "published_reference",
    "render_csv",
    "render_table",
    "ApplianceExperiment",
    "LabeledDataset",
    "assemble_dataset",
    "assemble_window_dataset",
    "augment_positives",
    "estimate_threshold",
    "make_labels",
    "split",
    "DenseStateChangeClassifier",
    "GruWindowClassifier",
    "evaluate_appliance",
    "prepare_appliance_data",
    "train_appliance",
    "parse_labels",
    "parse_redd_channel",
    "DeltaSeries",
    "PowerSeries",
    "delta",
    "resample_1min",
    "ApplianceSpec",
    "GeneratedHouse",
    "SyntheticHouse",
    "generate_house",
    "reference_scenario",
    "write_synthetic_house",
    "__version__",
]
