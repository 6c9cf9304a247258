"""Confusion accounting, precision/recall/F-measure, and comparison tables.

True negatives are tracked for completeness even though none of the three
scores use them. Any score whose denominator is zero is reported as 0 and
flagged as undefined rather than raising.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib.resources import files

import numpy as np

from .errors import DatasetError

_REFERENCE_RESOURCE = "resources/published_fmeasure.csv"


@dataclass(frozen=True)
class ConfusionCounts:
    """Outcome counts of a detector against ground truth."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class ClassificationScores:
    """Precision, recall and their harmonic mean, with zero-denominator flags."""

    precision: float
    recall: float
    f_measure: float
    undefined: tuple[str, ...] = ()


def confusion(predictions, truth) -> ConfusionCounts:
    """Count TP/FP/FN/TN over aligned 0/1 sequences."""
    predictions = np.asarray(predictions, dtype=np.int64).ravel()
    truth = np.asarray(truth, dtype=np.int64).ravel()
    if predictions.shape != truth.shape:
        raise DatasetError(
            f"{predictions.size} predictions but {truth.size} truth labels"
        )
    for name, arr in (("predictions", predictions), ("truth", truth)):
        if arr.size and not np.all((arr == 0) | (arr == 1)):
            raise DatasetError(f"{name} must contain only 0/1 labels")
    tp = int(np.sum((predictions == 1) & (truth == 1)))
    fp = int(np.sum((predictions == 1) & (truth == 0)))
    fn = int(np.sum((predictions == 0) & (truth == 1)))
    tn = int(np.sum((predictions == 0) & (truth == 0)))
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def metrics(counts: ConfusionCounts) -> ClassificationScores:
    """PR = TP/(TP+FP), RE = TP/(TP+FN), F = harmonic mean; 0 when undefined."""
    undefined = []
    if counts.tp + counts.fp > 0:
        precision = counts.tp / (counts.tp + counts.fp)
    else:
        precision = 0.0
        undefined.append("precision")
    if counts.tp + counts.fn > 0:
        recall = counts.tp / (counts.tp + counts.fn)
    else:
        recall = 0.0
        undefined.append("recall")
    if precision + recall > 0:
        f_measure = 2.0 * (precision * recall) / (precision + recall)
    else:
        f_measure = 0.0
        undefined.append("f_measure")
    return ClassificationScores(
        precision=precision, recall=recall, f_measure=f_measure, undefined=tuple(undefined)
    )


@dataclass(frozen=True)
class MetricsRow:
    """One (house, appliance, model) cell of a comparison report."""

    house: str
    appliance: str
    model: str
    f_measure: float
    precision: float | None = None
    recall: float | None = None
    counts: ConfusionCounts | None = None
    undefined: tuple[str, ...] = ()

    @classmethod
    def from_counts(cls, house: str, appliance: str, model: str,
                    counts: ConfusionCounts) -> "MetricsRow":
        scores = metrics(counts)
        return cls(
            house=house,
            appliance=appliance,
            model=model,
            f_measure=scores.f_measure,
            precision=scores.precision,
            recall=scores.recall,
            counts=counts,
            undefined=scores.undefined,
        )


CSV_FIELDS = (
    "house", "appliance", "model", "precision", "recall", "f_measure",
    "tp", "fp", "fn", "tn", "undefined",
)


def render_csv(rows: list[MetricsRow]) -> str:
    """Machine-readable report; empty cells where a value is not applicable."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        record = {
            "house": row.house,
            "appliance": row.appliance,
            "model": row.model,
            "precision": "" if row.precision is None else f"{row.precision:.6f}",
            "recall": "" if row.recall is None else f"{row.recall:.6f}",
            "f_measure": f"{row.f_measure:.6f}",
            "undefined": "|".join(row.undefined),
        }
        if row.counts is not None:
            record.update(tp=row.counts.tp, fp=row.counts.fp, fn=row.counts.fn,
                          tn=row.counts.tn)
        else:
            record.update(tp="", fp="", fn="", tn="")
        writer.writerow(record)
    return buffer.getvalue()


def parse_csv(text: str) -> list[MetricsRow]:
    """Inverse of :func:`render_csv` (lossless apart from float formatting)."""
    rows = []
    for record in csv.DictReader(io.StringIO(text)):
        counts = None
        if record["tp"] != "":
            counts = ConfusionCounts(
                tp=int(record["tp"]), fp=int(record["fp"]),
                fn=int(record["fn"]), tn=int(record["tn"]),
            )
        rows.append(
            MetricsRow(
                house=record["house"],
                appliance=record["appliance"],
                model=record["model"],
                precision=float(record["precision"]) if record["precision"] else None,
                recall=float(record["recall"]) if record["recall"] else None,
                f_measure=float(record["f_measure"]),
                counts=counts,
                undefined=tuple(record["undefined"].split("|")) if record["undefined"] else (),
            )
        )
    return rows


def render_table(rows: list[MetricsRow]) -> str:
    """Aligned text tables, one per house: models as rows, appliances as columns."""
    if not rows:
        raise DatasetError("report needs at least one row")
    lines: list[str] = []
    houses = sorted({r.house for r in rows})
    for house in houses:
        house_rows = [r for r in rows if r.house == house]
        appliances = sorted({r.appliance for r in house_rows})
        models = sorted({r.model for r in house_rows})
        cells = {(r.model, r.appliance): r for r in house_rows}
        width = max(9, *(len(a) for a in appliances)) + 2
        model_width = max(len("model (F_M)"), *(len(m) for m in models)) + 2
        lines.append(f"== {house} ==")
        header = "model (F_M)".ljust(model_width) + "".join(a.rjust(width) for a in appliances)
        lines.append(header)
        for model in models:
            row_cells = []
            for appliance in appliances:
                cell = cells.get((model, appliance))
                if cell is None:
                    row_cells.append("-".rjust(width))
                else:
                    flag = "*" if cell.undefined else ""
                    row_cells.append(f"{cell.f_measure:.2f}{flag}".rjust(width))
            lines.append(model.ljust(model_width) + "".join(row_cells))
        lines.append("")
    lines.append("* at least one score had a zero denominator and is reported as 0")
    return "\n".join(lines) + "\n"


def published_reference(houses: set[str] | None = None) -> list[MetricsRow]:
    """Published comparison F-measures, transcribed into a bundled data file.

    These are reference values from the original evaluation, never computed
    output; model names carry a ``_published`` suffix to keep that distinction
    visible in every report.
    """
    text = files("nilmevents").joinpath(_REFERENCE_RESOURCE).read_text(encoding="ascii")
    rows = []
    for record in csv.DictReader(io.StringIO(text)):
        if houses is not None and record["house"] not in houses:
            continue
        rows.append(
            MetricsRow(
                house=record["house"],
                appliance=record["appliance"],
                model=record["model"],
                f_measure=float(record["f_measure"]),
            )
        )
    return rows
