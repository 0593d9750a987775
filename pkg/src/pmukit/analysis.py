"""Per-channel and fleet-level feature analysis used by the CLI."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import anomaly, modal, preprocess
from .errors import PmukitError
from .report import AcfSummary, ChannelReport, FeatureReport, FleetAggregates
from .signal_model import ChannelKind, ChannelSeries, valid_segments

log = logging.getLogger("pmukit")


@dataclass(frozen=True)
class AnalyzeOptions:
    filter_order: int = 90
    acf_lags: int = 20
    variability_window: int = 5
    outlier_cfg: anomaly.OutlierConfig = anomaly.OutlierConfig()
    pencil_cfg: modal.PencilConfig = modal.PencilConfig()
    dropout_threshold: float = 0.02
    gap_threshold_s: float = 3.0
    run_modal: bool = True


def analyze_channel(series: ChannelSeries, options: AnalyzeOptions | None = None) -> ChannelReport:
    """Run the full preprocessing/anomaly/modal stack on one channel.

    Analyses that need more data than the channel provides are skipped and
    left as None in the report.
    """
    if options is None:
        options = AnalyzeOptions()
    rep: dict = {
        "pmu_id": series.pmu_id,
        "kind": series.kind.value,
        "samples": len(series),
        "rate_fps": series.spec.rate_fps,
    }

    comp = anomaly.completeness(series)
    rep["completeness"] = comp

    try:
        profile = preprocess.extract_noise(series, options.filter_order)
        rep["snr_db"] = profile.snr_db
        rep["noise_mean"] = profile.mean
        rep["noise_std"] = profile.std_dev
        rep["warmup_samples"] = profile.warmup_samples
    except PmukitError as exc:
        log.info("channel %s: noise extraction skipped (%s)", series.pmu_id, exc)
        profile = None

    try:
        rep["average_variability"] = preprocess.windowed_stats(series, options.variability_window).average_variability
    except PmukitError as exc:
        log.info("channel %s: windowed stats skipped (%s)", series.pmu_id, exc)

    try:
        rep["variance"] = preprocess.variance_decomposition(series, options.filter_order, options.outlier_cfg)
    except PmukitError as exc:
        log.info("channel %s: variance decomposition skipped (%s)", series.pmu_id, exc)

    if profile is not None:
        acf = _noise_acf(profile, options)
        if acf is not None:
            rep["acf"] = acf

    try:
        if series.kind is ChannelKind.VOLTAGE_ANGLE_DEG:
            rep["outliers"] = anomaly.angle_outlier_scan(series, options.outlier_cfg)
        else:
            rep["outliers"] = anomaly.detect_outliers(series, options.outlier_cfg)
    except PmukitError as exc:
        log.info("channel %s: outlier scan skipped (%s)", series.pmu_id, exc)

    if options.run_modal:
        try:
            track = modal.sliding_modal_scan(series, options.pencil_cfg)
            rep["mode_track"] = track
            rep["flagged_windows"] = modal.flag_disturbance_windows(track)
        except PmukitError as exc:
            log.info("channel %s: modal scan skipped (%s)", series.pmu_id, exc)

    return ChannelReport(**rep)


def _noise_acf(profile: preprocess.NoiseProfile, options: AnalyzeOptions) -> AcfSummary | None:
    """ACF of the longest gap-free noise segment after warm-up."""
    noise = profile.noise
    segments = [
        (start, length)
        for start, length in valid_segments(noise)
        if start + length > profile.warmup_samples
    ]
    if not segments:
        return None
    # Clip segments to the post-warm-up region, keep the longest.
    clipped = []
    for start, length in segments:
        s = max(start, profile.warmup_samples)
        clipped.append((s, start + length - s))
    start, length = max(clipped, key=lambda p: p[1])
    if length <= options.acf_lags + 1:
        return None
    try:
        acf = preprocess.autocorrelation(noise.values[start : start + length], options.acf_lags)
    except PmukitError:
        return None
    return AcfSummary(
        max_lag=acf.max_lag,
        lag1=float(acf.coefficients[1]),
        mean_abs_excl_zero=acf.mean_abs_excl_zero,
        iid=preprocess.iid_score(acf),
    )


def analyze_fleet(channels: list[ChannelSeries], options: AnalyzeOptions | None = None) -> FeatureReport:
    """Analyze every channel and assemble the fleet report (ordered by pmu_id)."""
    if options is None:
        options = AnalyzeOptions()
    ordered = sorted(channels, key=lambda s: (s.pmu_id, s.kind.value))
    reports = [analyze_channel(series, options) for series in ordered]
    n = len(reports)
    with_comp = [r for r in reports if r.completeness is not None]
    high = sum(1 for r in with_comp if r.completeness.dropout_rate > options.dropout_threshold)
    long_gap = sum(1 for r in with_comp if r.completeness.max_gap_seconds > options.gap_threshold_s)
    missing = sum(1 for r in with_comp if r.completeness.dropped_samples > 0)
    fleet = FleetAggregates(
        channel_count=n,
        high_dropout_count=high,
        long_gap_count=long_gap,
        any_missing_count=missing,
        any_missing_fraction=missing / n if n else 0.0,
        dropout_threshold=options.dropout_threshold,
        gap_threshold_s=options.gap_threshold_s,
    )
    return FeatureReport(channels=reports, fleet=fleet)
