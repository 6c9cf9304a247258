"""Reader/writer for the REDD low-frequency directory layout.

A house directory contains ``labels.dat`` with one ``"<channel> <name>"``
line per channel and one ``channel_<k>.dat`` per channel with
``"<unix_timestamp> <watts>"`` lines in (non-strictly) increasing time order.
"""

from __future__ import annotations

import os
import warnings
from pathlib import Path

import numpy as np

from .errors import DataFormatError
from .series import PowerSeries


def parse_redd_channel(path, channel_id: str = "", appliance_name: str = "") -> PowerSeries:
    """Parse one channel file into a validated series.

    Duplicate timestamps are collapsed keeping the last value; timestamps
    that decrease after deduplication are a format error. An empty file
    yields an empty series.
    """
    path = Path(path)
    if not path.is_file():
        raise DataFormatError("channel file not found", path=str(path))
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # loadtxt warns on empty input
            raw = np.loadtxt(path, dtype=np.float64, ndmin=2)
    except ValueError:
        _raise_line_diagnostic(path)
        raise  # unreachable: the diagnostic pass re-raises with a line number
    if raw.size == 0:
        return PowerSeries(
            timestamps=np.empty(0, dtype=np.int64),
            watts=np.empty(0),
            channel_id=channel_id or path.stem,
            appliance_name=appliance_name,
        )
    if raw.shape[1] != 2:
        raise DataFormatError(
            f"expected two columns 'timestamp watts', found {raw.shape[1]}", path=str(path)
        )
    ts = raw[:, 0]
    watts = raw[:, 1]
    if not np.all(np.isfinite(ts)) or np.any(ts != np.floor(ts)):
        bad = int(np.flatnonzero(~np.isfinite(ts) | (ts != np.floor(ts)))[0])
        raise DataFormatError("timestamp is not an integer", path=str(path), line=bad + 1)
    if not np.all(np.isfinite(watts)) or np.any(watts < 0):
        bad = int(np.flatnonzero(~np.isfinite(watts) | (watts < 0))[0])
        raise DataFormatError(
            "power reading is negative or not finite", path=str(path), line=bad + 1
        )
    ts = ts.astype(np.int64)
    steps = np.diff(ts)
    if np.any(steps < 0):
        bad = int(np.flatnonzero(steps < 0)[0]) + 1
        raise DataFormatError(
            "timestamps decrease (non-monotone after deduplication)",
            path=str(path),
            line=bad + 1,
        )
    # collapse duplicate timestamps, keeping the last value on each
    keep = np.append(steps != 0, True)
    return PowerSeries(
        timestamps=ts[keep],
        watts=watts[keep],
        channel_id=channel_id or path.stem,
        appliance_name=appliance_name,
    )


def _raise_line_diagnostic(path: Path) -> None:
    """Slow re-parse that reports the first malformed line."""
    with open(path, "r", encoding="ascii", errors="replace") as handle:
        for lineno, line in enumerate(handle, start=1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) != 2:
                raise DataFormatError(
                    f"expected 'timestamp watts', got {len(fields)} fields",
                    path=str(path),
                    line=lineno,
                )
            try:
                float(fields[0]), float(fields[1])
            except ValueError:
                raise DataFormatError(
                    f"could not parse {line.strip()!r} as 'timestamp watts'",
                    path=str(path),
                    line=lineno,
                ) from None
    raise DataFormatError("file could not be parsed as numeric columns", path=str(path))


def parse_labels(path) -> dict[int, str]:
    """Parse ``labels.dat`` into a channel-id to appliance-name map."""
    path = Path(path)
    if not path.is_file():
        raise DataFormatError("labels file not found", path=str(path))
    labels: dict[int, str] = {}
    with open(path, "r", encoding="ascii", errors="replace") as handle:
        for lineno, line in enumerate(handle, start=1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) != 2:
                raise DataFormatError(
                    f"expected 'channel appliance', got {len(fields)} fields",
                    path=str(path),
                    line=lineno,
                )
            try:
                channel = int(fields[0])
            except ValueError:
                raise DataFormatError(
                    f"channel id {fields[0]!r} is not an integer", path=str(path), line=lineno
                ) from None
            if channel in labels:
                raise DataFormatError(
                    f"duplicate channel id {channel}", path=str(path), line=lineno
                )
            labels[channel] = fields[1]
    return labels


def channel_path(house_dir, channel: int) -> Path:
    return Path(house_dir) / f"channel_{channel}.dat"


def load_house(house_dir, channels: list[int] | None = None) -> dict[int, PowerSeries]:
    """Load (a subset of) a house's channels, validating that all files exist."""
    house_dir = Path(house_dir)
    labels = parse_labels(house_dir / "labels.dat")
    wanted = sorted(labels) if channels is None else sorted(channels)
    unknown = [c for c in wanted if c not in labels]
    if unknown:
        raise DataFormatError(
            f"channels {unknown} are not listed in labels.dat", path=str(house_dir)
        )
    missing = [c for c in wanted if not channel_path(house_dir, c).exists()]
    if missing:
        raise DataFormatError(
            f"missing channel files for channels {missing}", path=str(house_dir)
        )
    return {
        c: parse_redd_channel(
            channel_path(house_dir, c), channel_id=str(c), appliance_name=labels[c]
        )
        for c in wanted
    }


def mains_channels(labels: dict[int, str]) -> list[int]:
    """Channels labeled 'mains' (the aggregate meters)."""
    return sorted(c for c, name in labels.items() if name == "mains")


def write_channel(path, series: PowerSeries) -> None:
    """Write a series in the channel-file format (full float precision)."""
    with open(path, "w", encoding="ascii") as handle:
        for ts, w in zip(series.timestamps, series.watts):
            handle.write(f"{int(ts)} {float(w)!r}\n")


def write_house(house_dir, labels: dict[int, str], series: dict[int, PowerSeries]) -> None:
    """Write a full house directory (labels.dat plus channel files)."""
    house_dir = Path(house_dir)
    os.makedirs(house_dir, exist_ok=True)
    with open(house_dir / "labels.dat", "w", encoding="ascii") as handle:
        for channel in sorted(labels):
            handle.write(f"{channel} {labels[channel]}\n")
    for channel, s in series.items():
        write_channel(channel_path(house_dir, channel), s)
