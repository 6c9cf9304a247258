"""Power time series containers and resampling/differencing transforms.

A :class:`PowerSeries` holds strictly increasing epoch timestamps and
non-negative watt readings for one channel. Gaps in a 1-minute series encode
segment boundaries: consecutive samples 60 s apart belong to the same
segment, larger jumps split the series, and deltas are never taken across a
split.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DatasetError

MINUTE = 60


@dataclass(frozen=True)
class PowerSeries:
    """Timestamped power readings for one channel (aggregate or appliance)."""

    timestamps: np.ndarray  # int64 seconds since epoch, strictly increasing
    watts: np.ndarray  # float64, finite, >= 0
    channel_id: str = ""
    appliance_name: str = ""

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.int64)
        w = np.asarray(self.watts, dtype=np.float64)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "watts", w)
        if ts.shape != w.shape or ts.ndim != 1:
            raise DatasetError(
                f"timestamps {ts.shape} and watts {w.shape} must be equal-length vectors"
            )
        if ts.size > 1 and np.any(np.diff(ts) <= 0):
            raise DatasetError("timestamps must be strictly increasing")
        if w.size and (not np.all(np.isfinite(w)) or np.any(w < 0)):
            raise DatasetError("power readings must be finite and non-negative")

    def __len__(self) -> int:
        return int(self.timestamps.size)

    def segment_slices(self, step: int = MINUTE) -> list[slice]:
        """Maximal runs of consecutive samples exactly ``step`` seconds apart."""
        if len(self) == 0:
            return []
        breaks = np.flatnonzero(np.diff(self.timestamps) != step)
        starts = np.concatenate([[0], breaks + 1])
        ends = np.concatenate([breaks + 1, [len(self)]])
        return [slice(int(a), int(b)) for a, b in zip(starts, ends)]


@dataclass(frozen=True)
class DeltaSeries:
    """Signed minute-to-minute power changes, stamped with the earlier minute."""

    timestamps: np.ndarray
    deltas: np.ndarray
    channel_id: str = ""
    appliance_name: str = ""

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.int64)
        d = np.asarray(self.deltas, dtype=np.float64)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "deltas", d)
        if ts.shape != d.shape or ts.ndim != 1:
            raise DatasetError("delta timestamps and values must be equal-length vectors")

    def __len__(self) -> int:
        return int(self.timestamps.size)


def resample_1min(series: PowerSeries, max_gap_minutes: int = 3) -> PowerSeries:
    """Average raw readings into epoch-aligned minute buckets.

    Empty buckets inside a gap of at most ``max_gap_minutes`` are filled by
    carrying the previous bucket's value forward; longer gaps are left open,
    which splits the output into segments.
    """
    if len(series) == 0:
        raise DatasetError(f"cannot resample an empty series (channel {series.channel_id!r})")
    buckets = series.timestamps // MINUTE
    # bucket ids arrive sorted because timestamps are strictly increasing
    ids, starts = np.unique(buckets, return_index=True)
    sums = np.add.reduceat(series.watts, starts)
    counts = np.diff(np.append(starts, len(series)))
    means = sums / counts

    out_ts: list[np.ndarray] = []
    out_w: list[np.ndarray] = []
    gaps = np.diff(ids)
    fill_ts: list[int] = []
    fill_w: list[float] = []
    for i, bucket_id in enumerate(ids):
        fill_ts.append(int(bucket_id))
        fill_w.append(float(means[i]))
        if i == len(ids) - 1:
            break
        missing = int(gaps[i]) - 1
        if missing == 0:
            continue
        if missing <= max_gap_minutes:
            fill_ts.extend(int(bucket_id) + k for k in range(1, missing + 1))
            fill_w.extend([float(means[i])] * missing)
        # longer gaps stay open: the next present bucket starts a new segment
    out_ts = np.asarray(fill_ts, dtype=np.int64) * MINUTE
    out_w = np.asarray(fill_w, dtype=np.float64)
    return PowerSeries(
        timestamps=out_ts,
        watts=out_w,
        channel_id=series.channel_id,
        appliance_name=series.appliance_name,
    )


def delta(series: PowerSeries, step: int = MINUTE) -> DeltaSeries:
    """Difference consecutive samples within each segment.

    A series (or segment) shorter than 2 contributes no deltas; this is not
    an error.
    """
    if len(series) < 2:
        return DeltaSeries(
            timestamps=np.empty(0, dtype=np.int64),
            deltas=np.empty(0),
            channel_id=series.channel_id,
            appliance_name=series.appliance_name,
        )
    adjacent = np.diff(series.timestamps) == step
    d = np.diff(series.watts)[adjacent]
    ts = series.timestamps[:-1][adjacent]
    return DeltaSeries(
        timestamps=ts,
        deltas=d,
        channel_id=series.channel_id,
        appliance_name=series.appliance_name,
    )


def align(a: PowerSeries, b: PowerSeries) -> tuple[PowerSeries, PowerSeries]:
    """Restrict both series to their common timestamps."""
    common, ia, ib = np.intersect1d(a.timestamps, b.timestamps, return_indices=True)
    return (
        replace(a, timestamps=common, watts=a.watts[ia]),
        replace(b, timestamps=common, watts=b.watts[ib]),
    )


def sum_series(series: list[PowerSeries], channel_id: str = "", appliance_name: str = "") -> PowerSeries:
    """Sum several channels over their common timestamps."""
    if not series:
        raise DatasetError("cannot sum an empty list of series")
    common = series[0].timestamps
    for s in series[1:]:
        common = np.intersect1d(common, s.timestamps)
    if common.size == 0:
        raise DatasetError("series share no common timestamps")
    total = np.zeros(common.size)
    for s in series:
        idx = np.searchsorted(s.timestamps, common)
        total += s.watts[idx]
    return PowerSeries(
        timestamps=common,
        watts=total,
        channel_id=channel_id or "+".join(s.channel_id for s in series),
        appliance_name=appliance_name,
    )


def cumulative_from_deltas(deltas: DeltaSeries, initial: float = 0.0) -> np.ndarray:
    """Rebuild a level sequence from deltas (round-trip check helper)."""
    return np.concatenate([[initial], initial + np.cumsum(deltas.deltas)])
