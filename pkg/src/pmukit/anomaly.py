"""Outlier detection and data-completeness metrics.

Point outliers are found with a Hampel identifier: a sample is flagged when
it deviates from the trailing-window median by more than
threshold * 1.4826 * MAD. Completeness is summarized by the drop-out rate
(missing fraction) and the maximum gap size in samples/seconds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._rolling import rolling_median_mad
from .errors import InvalidSpec, WindowTooLarge
from .preprocess import angle_first_difference, angle_unwrap
from .signal_model import ChannelKind, ChannelSeries, mask_runs


@dataclass(frozen=True)
class OutlierConfig:
    window: int = 90
    threshold: float = 3.0
    robust_scale_factor: float = 1.4826  # MAD-to-sigma for Gaussian data

    def __post_init__(self):
        if self.window < 3:
            raise InvalidSpec("window must be >= 3")
        if not (self.threshold > 0):
            raise InvalidSpec("threshold must be positive")


@dataclass(frozen=True)
class OutlierReport:
    indices: np.ndarray  # sorted sample indices
    percentage: float
    total_samples: int


@dataclass(frozen=True)
class CompletenessStats:
    dropout_rate: float
    max_gap_samples: int
    max_gap_seconds: float
    expected_samples: int
    dropped_samples: int


@dataclass(frozen=True)
class FleetChannelSummary:
    pmu_id: str
    outliers: OutlierReport
    completeness: CompletenessStats


@dataclass(frozen=True)
class FleetReport:
    channels: list[FleetChannelSummary]
    high_dropout_count: int
    high_dropout_fraction: float
    long_gap_count: int
    any_missing_count: int
    any_missing_fraction: float
    dropout_threshold: float
    gap_threshold_s: float


def detect_outliers(series: ChannelSeries, cfg: OutlierConfig, return_local_median: bool = False):
    """Hampel outlier scan over the trailing window.

    Flagging starts once a full window has been seen. A zero-MAD window
    flags only samples that differ from the local median beyond a relative
    epsilon. Missing samples are never flagged.
    """
    n = len(series)
    if n < cfg.window:
        raise WindowTooLarge(f"series length {n} below outlier window {cfg.window}")
    x = series.values.copy()
    x[series.missing_mask] = np.nan
    med, mad = rolling_median_mad(x, cfg.window)
    dev = np.abs(x - med)
    scale = cfg.threshold * cfg.robust_scale_factor * mad
    eps = 1e-12 * np.maximum(1.0, np.abs(med))
    with np.errstate(invalid="ignore"):
        flagged = np.where(mad > 0, dev > scale, dev > eps)
    flagged &= ~series.missing_mask
    flagged &= ~np.isnan(med)
    indices = np.flatnonzero(flagged)
    report = OutlierReport(indices=indices, percentage=100.0 * indices.size / n, total_samples=n)
    if return_local_median:
        return report, med
    return report


def angle_outlier_scan(series: ChannelSeries, cfg: OutlierConfig) -> OutlierReport:
    """Outlier scan on the stationarized (first-differenced) angle series.

    Consecutive flagged differences describe one raw event (a spike shows
    up as an up-step followed by a down-step), so runs of flagged
    differences are merged and each run maps to raw index run_start + 1.
    """
    if series.kind is not ChannelKind.VOLTAGE_ANGLE_DEG:
        raise InvalidSpec("angle_outlier_scan requires a voltage-angle series")
    if len(series) < cfg.window + 1:
        raise WindowTooLarge("series too short for the outlier window")
    diff = angle_first_difference(angle_unwrap(series))
    diff_report = detect_outliers(diff, cfg)
    flagged = np.zeros(len(diff), dtype=bool)
    flagged[diff_report.indices] = True
    raw_indices = np.array([start + 1 for start, _ in mask_runs(flagged)], dtype=np.int64)
    n = len(series)
    return OutlierReport(indices=raw_indices, percentage=100.0 * raw_indices.size / n, total_samples=n)


def completeness(series: ChannelSeries) -> CompletenessStats:
    """Drop-out rate and maximum gap size of a channel."""
    n = len(series)
    dropped = int(np.count_nonzero(series.missing_mask))
    gaps = mask_runs(series.missing_mask)
    max_gap = max((length for _, length in gaps), default=0)
    return CompletenessStats(
        dropout_rate=dropped / n,
        max_gap_samples=max_gap,
        max_gap_seconds=max_gap / series.spec.rate_fps,
        expected_samples=n,
        dropped_samples=dropped,
    )


def fleet_summary(
    channels: list[ChannelSeries],
    cfg: OutlierConfig | None = None,
    dropout_threshold: float = 0.02,
    gap_threshold_s: float = 3.0,
) -> FleetReport:
    """Per-channel outlier/completeness stats plus fleet-level aggregates."""
    if not channels:
        raise InvalidSpec("fleet must be nonempty")
    if cfg is None:
        cfg = OutlierConfig()
    ordered = sorted(channels, key=lambda s: s.pmu_id)
    summaries = []
    for series in ordered:
        summaries.append(
            FleetChannelSummary(
                pmu_id=series.pmu_id,
                outliers=detect_outliers(series, cfg),
                completeness=completeness(series),
            )
        )
    n = len(summaries)
    high = sum(1 for s in summaries if s.completeness.dropout_rate > dropout_threshold)
    long_gap = sum(1 for s in summaries if s.completeness.max_gap_seconds > gap_threshold_s)
    any_missing = sum(1 for s in summaries if s.completeness.dropped_samples > 0)
    return FleetReport(
        channels=summaries,
        high_dropout_count=high,
        high_dropout_fraction=high / n,
        long_gap_count=long_gap,
        any_missing_count=any_missing,
        any_missing_fraction=any_missing / n,
        dropout_threshold=dropout_threshold,
        gap_threshold_s=gap_threshold_s,
    )
