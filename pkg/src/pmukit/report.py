"""Feature report assembly and JSON serialization.

A FeatureReport aggregates per-channel noise/SNR, variability, variance
decomposition, ACF summary, outlier and completeness statistics, the modal
track with band labels, and fleet-level aggregates. Serialization is
plain JSON (non-finite floats use the JSON extension literals) and
round-trips losslessly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .anomaly import CompletenessStats, OutlierReport
from .modal import BandLabel, ModeEstimate, ModeTrack, classify_band
from .preprocess import VarianceComponents


@dataclass(frozen=True)
class AcfSummary:
    max_lag: int
    lag1: float
    mean_abs_excl_zero: float
    iid: bool


@dataclass(frozen=True)
class ChannelReport:
    pmu_id: str
    kind: str
    samples: int
    rate_fps: float
    snr_db: float | None = None
    noise_mean: float | None = None
    noise_std: float | None = None
    warmup_samples: int | None = None
    average_variability: float | None = None
    variance: VarianceComponents | None = None
    acf: AcfSummary | None = None
    outliers: OutlierReport | None = None
    completeness: CompletenessStats | None = None
    mode_track: ModeTrack | None = None
    flagged_windows: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class FleetAggregates:
    channel_count: int
    high_dropout_count: int
    long_gap_count: int
    any_missing_count: int
    any_missing_fraction: float
    dropout_threshold: float
    gap_threshold_s: float


@dataclass(frozen=True)
class FeatureReport:
    channels: list[ChannelReport]
    fleet: FleetAggregates


def _mode_to_dict(mode: ModeEstimate) -> dict:
    return {
        "frequency_hz": mode.frequency_hz,
        "magnitude": mode.magnitude,
        "damping_factor": mode.damping_factor,
        "band": classify_band(mode).value,
    }


def channel_report_to_dict(rep: ChannelReport) -> dict:
    out: dict = {
        "pmu_id": rep.pmu_id,
        "kind": rep.kind,
        "samples": rep.samples,
        "rate_fps": rep.rate_fps,
        "snr_db": rep.snr_db,
        "noise_mean": rep.noise_mean,
        "noise_std": rep.noise_std,
        "warmup_samples": rep.warmup_samples,
        "average_variability": rep.average_variability,
    }
    out["variance"] = asdict(rep.variance) if rep.variance else None
    out["acf"] = asdict(rep.acf) if rep.acf else None
    if rep.outliers is not None:
        out["outliers"] = {
            "indices": [int(i) for i in rep.outliers.indices],
            "percentage": rep.outliers.percentage,
            "total_samples": rep.outliers.total_samples,
        }
    else:
        out["outliers"] = None
    out["completeness"] = asdict(rep.completeness) if rep.completeness else None
    if rep.mode_track is not None:
        out["mode_track"] = {
            "window_s": rep.mode_track.window_s,
            "step_s": rep.mode_track.step_s,
            "skipped": list(rep.mode_track.skipped),
            "windows": [
                {"start_s": t0, "modes": [_mode_to_dict(m) for m in modes]}
                for t0, modes in rep.mode_track.windows
            ],
        }
    else:
        out["mode_track"] = None
    out["flagged_windows"] = list(rep.flagged_windows)
    return out


def report_to_dict(report: FeatureReport) -> dict:
    return {
        "fleet": asdict(report.fleet),
        "channels": [channel_report_to_dict(c) for c in report.channels],
    }


def report_from_dict(doc: dict) -> FeatureReport:
    fleet = FleetAggregates(**doc["fleet"])
    channels = []
    for c in doc["channels"]:
        variance = VarianceComponents(**c["variance"]) if c.get("variance") else None
        acf = AcfSummary(**c["acf"]) if c.get("acf") else None
        outliers = None
        if c.get("outliers"):
            o = c["outliers"]
            outliers = OutlierReport(
                indices=np.asarray(o["indices"], dtype=np.int64),
                percentage=o["percentage"],
                total_samples=o["total_samples"],
            )
        comp = CompletenessStats(**c["completeness"]) if c.get("completeness") else None
        track = None
        if c.get("mode_track"):
            tr = c["mode_track"]
            track = ModeTrack(
                windows=[
                    (
                        w["start_s"],
                        [
                            ModeEstimate(
                                frequency_hz=m["frequency_hz"],
                                magnitude=m["magnitude"],
                                damping_factor=m["damping_factor"],
                                window_start_s=w["start_s"],
                            )
                            for m in w["modes"]
                        ],
                    )
                    for w in tr["windows"]
                ],
                skipped=list(tr["skipped"]),
                window_s=tr["window_s"],
                step_s=tr["step_s"],
            )
        channels.append(
            ChannelReport(
                pmu_id=c["pmu_id"],
                kind=c["kind"],
                samples=c["samples"],
                rate_fps=c["rate_fps"],
                snr_db=c.get("snr_db"),
                noise_mean=c.get("noise_mean"),
                noise_std=c.get("noise_std"),
                warmup_samples=c.get("warmup_samples"),
                average_variability=c.get("average_variability"),
                variance=variance,
                acf=acf,
                outliers=outliers,
                completeness=comp,
                mode_track=track,
                flagged_windows=list(c.get("flagged_windows", [])),
            )
        )
    return FeatureReport(channels=channels, fleet=fleet)


def write_report(report: FeatureReport, path) -> None:
    Path(path).write_text(json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n")


def read_report(path) -> FeatureReport:
    return report_from_dict(json.loads(Path(path).read_text()))
