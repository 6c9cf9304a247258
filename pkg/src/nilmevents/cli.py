"""Command-line entry point: synth, ingest, train, eval, report.

Every command records a manifest (run id, seed, flags) next to its outputs
and exits nonzero exactly when a structured pipeline error occurs. Report
files contain no timestamps, so a rerun with the same seed is byte-identical.
"""

from __future__ import annotations

import datetime
import functools
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import click

from . import __version__
from .checkpoint import load_checkpoint, save_checkpoint
from .config import (
    INGEST_TOLERANCE,
    PUBLISHED_SAMPLE_TOTALS,
    config_to_dict,
    load_config,
    override_model,
    override_run,
    parse_config,
)
from .errors import NilmEventsError
from .evaluation import parse_csv, published_reference, render_csv, render_table
from .pipeline import (
    aggregate_minute_count,
    evaluate_appliance,
    model_display_name,
    prepare_appliance_data,
    resolve_house_dir,
    train_appliance,
)
from .redd import load_house, write_house
from .series import resample_1min
from .synth import generate_house, reference_scenario, write_synthetic_house


@dataclass
class RunManifest:
    """What produced the artifacts in an output directory."""

    command: str
    run_id: str
    created_utc: str
    seed: int | None
    config_path: str | None
    dataset_path: str | None
    out_dir: str
    flags: dict = field(default_factory=dict)
    version: str = __version__

    @classmethod
    def create(cls, command, out_dir, seed=None, config_path=None, dataset_path=None,
               **flags) -> "RunManifest":
        now = datetime.datetime.now(datetime.timezone.utc)
        stamp = now.strftime("%Y%m%dT%H%M%SZ")
        return cls(
            command=command,
            run_id=f"{command}-{stamp}" + (f"-seed{seed}" if seed is not None else ""),
            created_utc=now.isoformat(),
            seed=seed,
            config_path=str(config_path) if config_path else None,
            dataset_path=str(dataset_path) if dataset_path else None,
            out_dir=str(out_dir),
            flags=flags,
        )

    def write(self) -> None:
        out = Path(self.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "manifest.json", "w", encoding="ascii") as handle:
            json.dump(asdict(self), handle, indent=1, sort_keys=True)
            handle.write("\n")


def structured_errors(func):
    """Map pipeline errors to a clean message and exit status 1."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except NilmEventsError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


@click.group()
@click.version_option(version=__version__)
def main():
    """Detect per-appliance state changes from a single aggregate meter."""


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory.")
@click.option("--seed", type=int, default=None, help="Scenario seed (default: built-in).")
@click.option("--duration", type=int, default=20000, show_default=True,
              help="Scenario length in minutes.")
@structured_errors
def synth(out_dir, seed, duration):
    """Write the synthetic reference house in the standard house layout."""
    if seed is None:
        scenario = reference_scenario(duration_minutes=duration)
    else:
        scenario = reference_scenario(duration_minutes=duration, seed=seed)
    gen = generate_house(scenario)
    house_dir = Path(out_dir) / "house_synth"
    write_synthetic_house(gen, house_dir)
    manifest = RunManifest.create("synth", out_dir, seed=scenario.seed, duration=duration)
    manifest.write()
    click.echo(f"wrote {house_dir} ({duration} minutes, seed {scenario.seed})")
    for name, labels in gen.state_changes.items():
        click.echo(f"  {name}: {int(labels.sum())} state changes")


@main.command()
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True),
              help="Dataset root containing house directories.")
@click.option("--house", required=True, help="House name (e.g. house_1) or number.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Experiment config (for the mains channel list).")
@structured_errors
def ingest(data_dir, house, out_dir, config_path):
    """Resample a house to 1-minute resolution and report sample counts."""
    house = house if house.startswith("house") else f"house_{house}"
    house_dir = resolve_house_dir(data_dir, house)
    channels = load_house(house_dir)
    resampled = {c: resample_1min(s) for c, s in channels.items()}
    labels = {c: s.appliance_name for c, s in channels.items()}
    out_house = Path(out_dir) / house
    write_house(out_house, labels, resampled)
    manifest = RunManifest.create("ingest", out_dir, dataset_path=data_dir, house=house)
    manifest.write()
    for c in sorted(resampled):
        click.echo(f"channel_{c} ({labels[c]}): {len(resampled[c])} one-minute samples")
    config = load_config(config_path) if config_path else _labels_only_config(house)
    total = aggregate_minute_count(house_dir, config)
    click.echo(f"aggregate: {total} one-minute samples")
    if house in PUBLISHED_SAMPLE_TOTALS:
        published = PUBLISHED_SAMPLE_TOTALS[house]
        deviation = abs(total - published) / published
        verdict = "within" if deviation <= INGEST_TOLERANCE else "OUTSIDE"
        click.echo(
            f"published total: {published}; deviation {deviation:.2%} "
            f"({verdict} the ±{INGEST_TOLERANCE:.0%} tolerance)"
        )


def _labels_only_config(house: str):
    """Minimal config for commands that only need mains resolution."""
    return parse_config(
        {
            "house": house,
            "appliances": {"_": {"channels": [1], "threshold_watts": 1,
                                 "training_samples": 1}},
        },
        source="<builtin>",
    )


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True))
@click.option("--appliance", required=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--model", type=click.Choice(["dnn", "rnn"]), default="dnn", show_default=True)
@click.option("--window", type=click.IntRange(2, 3), default=2, show_default=True,
              help="RNN window length.")
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--hidden", type=int, default=None, help="Hidden width override.")
@click.option("--alpha", type=float, default=None, help="Positive:negative target ratio.")
@click.option("--seed", type=int, default=None)
@click.option("--house", default=None, help="Override the config's house name.")
@structured_errors
def train(config_path, data_dir, appliance, out_dir, model, window, epochs, batch_size,
          hidden, alpha, seed, house):
    """Label, split, augment and train one appliance model; write a checkpoint."""
    config = load_config(config_path)
    config = override_run(config, seed=seed, alpha=alpha, house=house)
    config = override_model(config, epochs=epochs, batch_size=batch_size, hidden_width=hidden)
    house_dir = resolve_house_dir(data_dir, config.house)
    estimator, data = train_appliance(house_dir, config, appliance, model, window)
    name = model_display_name(model, window)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    checkpoint_path = out / f"{config.house}_{appliance}_{name}.ckpt"
    provenance = {
        "house": config.house,
        "appliance": appliance,
        "model": model,
        "window_length": window,
        "config": config_to_dict(config),
    }
    save_checkpoint(estimator, checkpoint_path, provenance=provenance)
    history_path = out / f"{config.house}_{appliance}_{name}_loss.csv"
    with open(history_path, "w", encoding="ascii") as handle:
        handle.write("epoch,mean_loss\n")
        for i, loss in enumerate(estimator.history_, start=1):
            handle.write(f"{i},{loss!r}\n")
    manifest = RunManifest.create(
        "train", out_dir, seed=config.seed, config_path=config_path,
        dataset_path=data_dir, appliance=appliance, model=name,
    )
    manifest.write()
    click.echo(
        f"trained {name} for {appliance} ({config.house}): "
        f"{estimator.n_parameters_} parameters, "
        f"{data.train.n_pos}/{data.train.n_neg} pos/neg after augmentation "
        f"(raw {data.train_raw.n_pos}/{data.train_raw.n_neg})"
    )
    if estimator.history_:
        click.echo(
            f"loss: {estimator.history_[0]:.4f} -> {estimator.history_[-1]:.4f} "
            f"over {len(estimator.history_)} epochs"
        )
    click.echo(f"checkpoint: {checkpoint_path}")


@main.command("eval")
@click.option("--checkpoint", "checkpoint_path", required=True, type=click.Path(exists=True))
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Override the config stored in the checkpoint.")
@click.option("--with-paper-reference", is_flag=True,
              help="Append the published comparison rows to the report.")
@structured_errors
def eval_cmd(checkpoint_path, data_dir, out_dir, config_path, with_paper_reference):
    """Score a checkpoint on its held-out test split and write the report."""
    estimator, provenance = load_checkpoint(checkpoint_path)
    if config_path is not None:
        config = load_config(config_path)
    else:
        config = parse_config(provenance["config"], source=f"checkpoint:{checkpoint_path}")
    appliance = provenance["appliance"]
    model = provenance["model"]
    window = provenance.get("window_length", 2)
    house_dir = resolve_house_dir(data_dir, config.house)
    data = prepare_appliance_data(house_dir, config, appliance, model, window)
    name = model_display_name(model, window)
    row = evaluate_appliance(estimator, data.test, data.experiment, name)
    rows = [row]
    if with_paper_reference:
        reference = published_reference(houses={config.house})
        if not reference:
            click.echo(f"note: no published reference values for {config.house}", err=True)
        rows.extend(reference)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.csv").write_text(render_csv(rows), encoding="ascii")
    table = render_table(rows)
    (out / "report.txt").write_text(table, encoding="ascii")
    manifest = RunManifest.create(
        "eval", out_dir, seed=config.seed, config_path=config_path,
        dataset_path=data_dir, checkpoint=str(checkpoint_path),
        with_paper_reference=with_paper_reference,
    )
    manifest.write()
    click.echo(table, nl=False)
    click.echo(
        f"{appliance} {name}: PR={row.precision:.4f} RE={row.recall:.4f} "
        f"F={row.f_measure:.4f} (tp={row.counts.tp} fp={row.counts.fp} "
        f"fn={row.counts.fn} tn={row.counts.tn})"
    )


@main.command()
@click.argument("metrics_files", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.option("--with-paper-reference", is_flag=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the table here instead of stdout only.")
@structured_errors
def report(metrics_files, with_paper_reference, out_path):
    """Merge metrics CSV files into one comparison table."""
    rows = []
    for path in metrics_files:
        rows.extend(parse_csv(Path(path).read_text(encoding="ascii")))
    if with_paper_reference:
        houses = {r.house for r in rows} or None
        rows.extend(published_reference(houses=houses))
    table = render_table(rows)
    if out_path is not None:
        Path(out_path).write_text(table, encoding="ascii")
    click.echo(table, nl=False)


if __name__ == "__main__":
    main()
