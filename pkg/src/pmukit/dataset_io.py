"""Wide-table CSV dataset format.

Column 1 is the timestamp in seconds on a fixed-rate grid; every PMU then
contributes three columns: <id>_vm (per-unit voltage magnitude), <id>_va
(voltage angle, degrees) and <id>_freq (frequency, Hz). Missing samples
are stored verbatim as their filler token (empty/NaN cell or a filler
value such as 9999), so write followed by read reproduces values and
masks exactly.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import MixedRates, NonUniformTimestamps, ParseError, RaggedRow
from .signal_model import (
    ChannelKind,
    ChannelSeries,
    DEFAULT_FILLER_POLICY,
    FillerPolicy,
    SamplingSpec,
    new_channel_series,
)

_SUFFIX_TO_KIND = {
    "vm": ChannelKind.VOLTAGE_MAGNITUDE_PU,
    "va": ChannelKind.VOLTAGE_ANGLE_DEG,
    "freq": ChannelKind.FREQUENCY_HZ,
}
_KIND_TO_SUFFIX = {v: k for k, v in _SUFFIX_TO_KIND.items()}

TIMESTAMP_TOLERANCE_S = 1e-6


def _split_column(name: str) -> tuple[str, ChannelKind]:
    pmu_id, _, suffix = name.rpartition("_")
    if not pmu_id or suffix not in _SUFFIX_TO_KIND:
        raise ParseError(f"column '{name}' does not match <id>_vm|<id>_va|<id>_freq")
    return pmu_id, _SUFFIX_TO_KIND[suffix]


def read_dataset(
    path,
    policy: FillerPolicy = DEFAULT_FILLER_POLICY,
    nominal_hz: float = 60.0,
) -> list[ChannelSeries]:
    """Parse a wide-table CSV into one ChannelSeries per (pmu, kind)."""
    path = Path(path)
    try:
        frame = pd.read_csv(
            path, na_values=["NaN"], on_bad_lines="error", float_precision="round_trip"
        )
    except pd.errors.ParserError as exc:
        raise RaggedRow(f"{path}: {exc}") from exc
    except (OSError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if frame.shape[1] < 2:
        raise ParseError(f"{path}: need a timestamp column plus channel columns")
    if frame.shape[0] < 1:
        raise ParseError(f"{path}: no data rows")

    t = frame.iloc[:, 0].to_numpy(dtype=np.float64)
    if np.any(~np.isfinite(t)):
        bad = int(np.flatnonzero(~np.isfinite(t))[0])
        raise ParseError(f"{path}: non-numeric timestamp at data row {bad + 1}")
    if t.size > 1:
        d = np.diff(t)
        if np.any(d <= 0) or np.max(np.abs(d - d.mean())) > TIMESTAMP_TOLERANCE_S:
            raise NonUniformTimestamps(f"{path}: timestamps are not on a uniform increasing grid")
        rate = 1.0 / d.mean()
        # Snap to a whole report rate when within tolerance (30, 60, ...).
        if abs(rate - round(rate)) < 1e-6 * rate:
            rate = float(round(rate))
    else:
        rate = 30.0
    spec = SamplingSpec(rate_fps=rate, nominal_hz=nominal_hz, start_time=float(t[0]))

    channels = []
    for name in frame.columns[1:]:
        pmu_id, kind = _split_column(str(name))
        values = frame[name].to_numpy(dtype=np.float64)
        channels.append(new_channel_series(kind, spec, values, policy=policy, pmu_id=pmu_id))
    return channels


def write_dataset(channels: list[ChannelSeries], path) -> None:
    """Inverse of read_dataset; missing samples keep their stored filler."""
    if not channels:
        raise MixedRates("need at least one channel")
    ref = channels[0].spec
    n = len(channels[0])
    for series in channels:
        if (
            len(series) != n
            or series.spec.rate_fps != ref.rate_fps
            or series.spec.start_time != ref.start_time
        ):
            raise MixedRates("all channels must share one sampling spec and length")
    data = {"time": ref.timestamps(n)}
    for series in channels:
        data[f"{series.pmu_id}_{_KIND_TO_SUFFIX[series.kind]}"] = series.values
    frame = pd.DataFrame(data)
    frame.to_csv(path, index=False, float_format="%.17g", na_rep="NaN")
