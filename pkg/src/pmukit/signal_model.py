"""Canonical PMU channel time-series representation.

A channel is a uniformly sampled sequence of values plus a missing-sample
mask. Missing samples keep a placeholder (NaN or a filler value such as
9999) in the value array; the mask is the source of truth for validity.
Series are immutable: every operation returns a new series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import EmptySeries, InvalidSpec


class ChannelKind(Enum):
    VOLTAGE_MAGNITUDE_PU = "vm"
    VOLTAGE_ANGLE_DEG = "va"
    FREQUENCY_HZ = "freq"


@dataclass(frozen=True)
class SamplingSpec:
    """Uniform sampling grid: sample i is at start_time + i / rate_fps."""

    rate_fps: float = 30.0
    nominal_hz: float = 60.0
    start_time: float = 0.0

    def __post_init__(self):
        if not (self.rate_fps > 0):
            raise InvalidSpec(f"rate_fps must be positive, got {self.rate_fps}")
        if not (self.nominal_hz > 0):
            raise InvalidSpec(f"nominal_hz must be positive, got {self.nominal_hz}")

    def timestamp(self, i: int) -> float:
        # Integer index keeps 1e6-sample grids drift-free; never accumulate.
        return self.start_time + i / self.rate_fps

    def timestamps(self, n: int) -> np.ndarray:
        return self.start_time + np.arange(n) / self.rate_fps


@dataclass(frozen=True)
class FillerPolicy:
    """Which stored values mean 'this sample was dropped'.

    Fillers are matched by exact equality: concentrators write them
    verbatim, they are never perturbed.
    """

    filler_values: frozenset = frozenset({9999.0, -9999.0})
    treat_nan_as_missing: bool = True

    def __post_init__(self):
        object.__setattr__(self, "filler_values", frozenset(float(v) for v in self.filler_values))
        if not self.treat_nan_as_missing and not self.filler_values:
            raise InvalidSpec("filler_values must be nonempty when NaN is not treated as missing")
        for v in self.filler_values:
            if not math.isfinite(v):
                raise InvalidSpec("filler_values must be finite")

    def missing_mask(self, values: np.ndarray) -> np.ndarray:
        mask = np.zeros(values.shape, dtype=bool)
        if self.treat_nan_as_missing:
            mask |= ~np.isfinite(values)
        for v in self.filler_values:
            mask |= values == v
        return mask


DEFAULT_FILLER_POLICY = FillerPolicy()


@dataclass(frozen=True)
class ChannelSeries:
    """One PMU channel. Values and mask are read-only numpy arrays."""

    kind: ChannelKind
    spec: SamplingSpec
    values: np.ndarray
    missing_mask: np.ndarray
    pmu_id: str = ""

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        mask = np.ascontiguousarray(self.missing_mask, dtype=bool)
        if values.size == 0:
            raise EmptySeries("series must contain at least one sample")
        if values.shape != mask.shape or values.ndim != 1:
            raise InvalidSpec("values and missing_mask must be 1-D and the same length")
        values.flags.writeable = False
        mask.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "missing_mask", mask)

    def __len__(self) -> int:
        return self.values.size

    @property
    def rate_fps(self) -> float:
        return self.spec.rate_fps

    @property
    def duration_s(self) -> float:
        return len(self) / self.spec.rate_fps

    @property
    def valid_values(self) -> np.ndarray:
        return self.values[~self.missing_mask]

    def timestamps(self) -> np.ndarray:
        return self.spec.timestamps(len(self))

    def with_data(self, values: np.ndarray, missing_mask: np.ndarray | None = None) -> "ChannelSeries":
        """New series sharing kind/spec/id, without re-applying construction policy."""
        if missing_mask is None:
            missing_mask = self.missing_mask
        return replace(self, values=np.array(values), missing_mask=np.array(missing_mask))


def normalize_angle_deg(values: np.ndarray) -> np.ndarray:
    """Wrap angles into [-180, 180)."""
    return (np.asarray(values, dtype=np.float64) + 180.0) % 360.0 - 180.0


def new_channel_series(
    kind: ChannelKind,
    spec: SamplingSpec,
    values,
    policy: FillerPolicy = DEFAULT_FILLER_POLICY,
    pmu_id: str = "",
) -> ChannelSeries:
    """Build a series, deriving the missing mask from the filler policy.

    Voltage-angle values are normalized into [-180, 180) at construction;
    filler placeholders are kept verbatim so the mask derivation round-trips.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptySeries("values must be nonempty")
    mask = policy.missing_mask(values)
    if kind is ChannelKind.VOLTAGE_ANGLE_DEG:
        values = values.copy()
        values[~mask] = normalize_angle_deg(values[~mask])
    if np.any(~np.isfinite(values[~mask])):
        raise InvalidSpec("non-missing values must be finite")
    return ChannelSeries(kind=kind, spec=spec, values=values, missing_mask=mask, pmu_id=pmu_id)


def valid_segments(series: ChannelSeries) -> list[tuple[int, int]]:
    """Maximal runs of contiguous non-missing samples as (start, length)."""
    return mask_runs(~series.missing_mask)


def mask_runs(flag: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of True in a boolean array as (start, length)."""
    flag = np.asarray(flag, dtype=bool)
    if flag.size == 0:
        return []
    edges = np.flatnonzero(np.diff(flag.astype(np.int8)))
    starts = [0] if flag[0] else []
    starts += list(edges[~flag[edges]] + 1)
    ends = list(edges[flag[edges]] + 1)
    if flag[-1]:
        ends.append(flag.size)
    return [(int(s), int(e - s)) for s, e in zip(starts, ends)]
