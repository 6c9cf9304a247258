"""Synthetic multi-appliance households with known state-change ground truth.

Each appliance is a seeded Markov dwell process over its power levels with
geometric (memoryless) per-minute dwell times; the aggregate is the exact
sum of the appliance readings plus a clipped Gaussian noise floor. The
generator can emit the standard house directory layout so the whole
ingestion path runs without any real dataset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .redd import write_house
from .series import MINUTE, PowerSeries

BASE_TIMESTAMP = 1_302_000_000  # arbitrary minute-aligned epoch origin


@dataclass(frozen=True)
class ApplianceSpec:
    """Power levels, per-level mean dwell times and reading jitter."""

    name: str
    levels: tuple[float, ...]
    mean_dwell_minutes: tuple[float, ...]
    jitter_std: float = 0.0

    def __post_init__(self):
        if len(self.levels) < 2:
            raise ValueError(f"{self.name}: need at least 2 power levels")
        if len(set(self.levels)) != len(self.levels):
            raise ValueError(f"{self.name}: power levels must be distinct")
        if any(lv < 0 for lv in self.levels):
            raise ValueError(f"{self.name}: power levels must be non-negative")
        if len(self.mean_dwell_minutes) != len(self.levels):
            raise ValueError(f"{self.name}: one dwell time per level required")
        if any(d <= 0 for d in self.mean_dwell_minutes):
            raise ValueError(f"{self.name}: dwell times must be positive")
        if self.jitter_std < 0:
            raise ValueError(f"{self.name}: jitter must be non-negative")

    @property
    def min_level_gap(self) -> float:
        ordered = sorted(self.levels)
        return min(b - a for a, b in zip(ordered, ordered[1:]))


@dataclass(frozen=True)
class SyntheticHouse:
    """Scenario description: appliances, noise floor, duration and seed."""

    appliances: tuple[ApplianceSpec, ...]
    noise_std: float = 0.0
    duration_minutes: int = 1440
    seed: int = 0

    def __post_init__(self):
        if self.duration_minutes < 2:
            raise ValueError("duration must be at least 2 minutes")
        if self.noise_std < 0:
            raise ValueError("noise std must be non-negative")
        names = [a.name for a in self.appliances]
        if len(set(names)) != len(names):
            raise ValueError("appliance names must be unique")


@dataclass(frozen=True)
class GeneratedHouse:
    """Realized readings, per-appliance ground truth and the noise sequence."""

    spec: SyntheticHouse
    aggregate: PowerSeries
    appliances: dict[str, PowerSeries]
    state_changes: dict[str, np.ndarray]  # label[i]: level changed t_i -> t_{i+1}
    noise: np.ndarray


def _dwell_process(spec: ApplianceSpec, minutes: int, rng: np.random.Generator) -> np.ndarray:
    """Level-index sequence: each minute, leave state s with prob 1/dwell[s]."""
    n_levels = len(spec.levels)
    states = np.empty(minutes, dtype=np.int64)
    state = 0
    leave = rng.random(minutes)
    jump = rng.integers(1, n_levels, size=minutes)  # offset to another level
    for t in range(minutes):
        states[t] = state
        if leave[t] < 1.0 / spec.mean_dwell_minutes[state]:
            state = (state + int(jump[t])) % n_levels
    return states


def generate_house(spec: SyntheticHouse) -> GeneratedHouse:
    """Realize the scenario deterministically from its seed."""
    rng = np.random.default_rng(spec.seed)
    minutes = spec.duration_minutes
    timestamps = BASE_TIMESTAMP + MINUTE * np.arange(minutes, dtype=np.int64)
    appliance_series: dict[str, PowerSeries] = {}
    state_changes: dict[str, np.ndarray] = {}
    total = np.zeros(minutes)
    for appliance in spec.appliances:
        sub = rng.spawn(1)[0]
        states = _dwell_process(appliance, minutes, sub)
        watts = np.asarray(appliance.levels, dtype=np.float64)[states]
        if appliance.jitter_std > 0:
            watts = watts + sub.normal(0.0, appliance.jitter_std, size=minutes)
        watts = np.maximum(watts, 0.0)
        appliance_series[appliance.name] = PowerSeries(
            timestamps=timestamps, watts=watts, appliance_name=appliance.name
        )
        state_changes[appliance.name] = (states[1:] != states[:-1]).astype(np.int64)
        total += watts
    noise = rng.normal(0.0, spec.noise_std, size=minutes) if spec.noise_std > 0 else np.zeros(minutes)
    aggregate_watts = np.maximum(total + noise, 0.0)
    realized_noise = aggregate_watts - total  # exact by construction, clip included
    aggregate = PowerSeries(
        timestamps=timestamps, watts=aggregate_watts, appliance_name="aggregate"
    )
    return GeneratedHouse(
        spec=spec,
        aggregate=aggregate,
        appliances=appliance_series,
        state_changes=state_changes,
        noise=realized_noise,
    )


def reference_scenario(duration_minutes: int = 20000, seed: int = 1104) -> SyntheticHouse:
    """Fixed three-appliance scenario used by the end-to-end test suite.

    A frequently cycling 150 W appliance plus two rare high-power appliances
    whose positive rates are well under 2%, so their training paths exercise
    the class-imbalance augmentation.
    """
    return SyntheticHouse(
        appliances=(
            ApplianceSpec(
                name="cycler", levels=(0.0, 150.0), mean_dwell_minutes=(12.0, 8.0),
                jitter_std=1.0,
            ),
            ApplianceSpec(
                name="pulse", levels=(0.0, 900.0), mean_dwell_minutes=(400.0, 3.0),
                jitter_std=2.0,
            ),
            ApplianceSpec(
                name="heavy", levels=(0.0, 1400.0), mean_dwell_minutes=(900.0, 25.0),
                jitter_std=3.0,
            ),
        ),
        noise_std=2.0,
        duration_minutes=duration_minutes,
        seed=seed,
    )


def house_channel_layout(gen: GeneratedHouse) -> tuple[dict[int, str], dict[int, PowerSeries]]:
    """Map a generated house onto the channel-file convention.

    Channel 1 is the mains (aggregate); appliances follow in spec order.
    """
    labels = {1: "mains"}
    series = {1: gen.aggregate}
    for i, appliance in enumerate(gen.spec.appliances, start=2):
        labels[i] = appliance.name
        series[i] = gen.appliances[appliance.name]
    return labels, series


def write_synthetic_house(gen: GeneratedHouse, house_dir) -> None:
    """Emit the generated house in the on-disk house directory layout."""
    labels, series = house_channel_layout(gen)
    write_house(house_dir, labels, series)
