"""Filtering, noise extraction, SNR, windowed statistics, variance
decomposition, autocorrelation, and angle differencing.

The median filter is causal (trailing window) with raw pass-through during
warm-up, which makes the extracted noise identically zero over the first
order-1 samples: at 30 frames/s and order 90 that is the familiar 3-second
dead band at the start of a noise trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rolling import rolling_median
from .errors import (
    ConstantSeries,
    DegenerateSignal,
    InvalidSpec,
    OrderTooLarge,
    TooShort,
    WindowTooLarge,
    WrongKind,
)
from .signal_model import ChannelKind, ChannelSeries, valid_segments


@dataclass(frozen=True)
class NoiseProfile:
    """Residual signal after median filtering, with its summary statistics."""

    noise: ChannelSeries
    snr_db: float
    mean: float
    std_dev: float
    warmup_samples: int


@dataclass(frozen=True)
class VarianceComponents:
    """Split of total signal variance into dynamics, noise and anomaly parts."""

    total: float
    dynamics: float
    noise: float
    anomaly: float

    def __post_init__(self):
        for name in ("total", "dynamics", "noise", "anomaly"):
            if getattr(self, name) < 0:
                raise InvalidSpec(f"variance component {name} must be nonnegative")
        s = self.dynamics + self.noise + self.anomaly
        if self.total > 0 and abs(s - self.total) > 1e-9 * self.total:
            raise InvalidSpec("components must sum to total variance")


@dataclass(frozen=True)
class WindowStats:
    window_len: int
    means: np.ndarray
    variances: np.ndarray  # NaN where a window had < 2 valid samples
    average_variability: float


@dataclass(frozen=True)
class AcfResult:
    max_lag: int
    coefficients: np.ndarray  # index k = 0 .. max_lag
    mean_abs_excl_zero: float


def median_filter(series: ChannelSeries, order: int) -> ChannelSeries:
    """Causal median filter of the given order.

    output[i] is the median of the valid samples in the trailing window of
    `order` positions ending at i; the first order-1 samples pass through
    unfiltered. Windows with no valid sample produce a missing output.
    """
    n = len(series)
    if order < 1:
        raise InvalidSpec("order must be >= 1")
    if order > n:
        raise OrderTooLarge(f"order {order} exceeds series length {n}")
    x = series.values.copy()
    x[series.missing_mask] = np.nan
    med = rolling_median(x, order)
    warm = order - 1
    out = med
    out[:warm] = series.values[:warm]
    out_mask = np.isnan(med)
    out_mask[:warm] = series.missing_mask[:warm]
    return series.with_data(out, out_mask)


def snr_db(signal, noise) -> float:
    """10 log10 of the signal-to-noise variance ratio, in decibels."""
    signal = np.asarray(signal, dtype=np.float64)
    noise = np.asarray(noise, dtype=np.float64)
    if signal.size == 0 or noise.size == 0:
        raise DegenerateSignal("signal and noise must be nonempty")
    vs = float(np.var(signal, ddof=1)) if signal.size > 1 else 0.0
    vn = float(np.var(noise, ddof=1)) if noise.size > 1 else 0.0
    if vn == 0.0:
        if vs == 0.0:
            raise DegenerateSignal("both signal and noise have zero variance")
        return math.inf
    return 10.0 * math.log10(vs / vn)


def extract_noise(series: ChannelSeries, order: int) -> NoiseProfile:
    """Noise residual raw - median_filter(raw), zero during filter warm-up."""
    filtered = median_filter(series, order)
    warm = order - 1
    noise_vals = series.values - filtered.values
    noise_vals[:warm] = 0.0
    noise_mask = series.missing_mask | filtered.missing_mask
    noise_mask[:warm] = series.missing_mask[:warm]
    noise_vals[noise_mask] = np.nan
    noise_vals[:warm] = 0.0
    noise_series = series.with_data(noise_vals, noise_mask)

    sel = ~noise_mask
    sel[:warm] = False
    nsel = noise_vals[sel]
    if nsel.size == 0:
        raise TooShort("no valid samples after warm-up")
    mean = float(np.mean(nsel))
    std = float(np.std(nsel, ddof=1)) if nsel.size > 1 else 0.0
    if std == 0.0:
        snr = math.inf
    else:
        snr = snr_db(filtered.values[sel], nsel)
    return NoiseProfile(noise=noise_series, snr_db=snr, mean=mean, std_dev=std, warmup_samples=warm)


def windowed_stats(series: ChannelSeries, window_len: int) -> WindowStats:
    """Per-window mean/unbiased variance over non-overlapping windows."""
    if window_len < 2:
        raise InvalidSpec("window_len must be >= 2")
    n = len(series)
    k = n // window_len
    if k == 0:
        raise WindowTooLarge(f"window_len {window_len} exceeds series length {n}")
    x = series.values[: k * window_len].copy()
    x[series.missing_mask[: k * window_len]] = np.nan
    w = x.reshape(k, window_len)
    counts = np.sum(~np.isnan(w), axis=1)
    with np.errstate(invalid="ignore"):
        means = np.where(counts > 0, np.nansum(w, axis=1) / np.maximum(counts, 1), np.nan)
        sq = np.nansum((w - means[:, None]) ** 2, axis=1)
    variances = np.full(k, np.nan)
    ok = counts >= 2
    variances[ok] = sq[ok] / (counts[ok] - 1)
    if not np.any(ok):
        raise WindowTooLarge("no window holds >= 2 valid samples")
    avg = float(np.mean(variances[ok]))
    return WindowStats(window_len=window_len, means=means, variances=variances, average_variability=avg)


def autocorrelation(values, max_lag: int) -> AcfResult:
    """Biased (Box-Jenkins) autocorrelation up to max_lag."""
    z = np.asarray(values, dtype=np.float64)
    if max_lag < 1:
        raise InvalidSpec("max_lag must be >= 1")
    if z.size <= max_lag + 1:
        raise TooShort(f"need more than {max_lag + 1} samples, got {z.size}")
    if np.any(np.isnan(z)):
        raise InvalidSpec("values must not contain missing entries")
    d = z - z.mean()
    c0 = float(np.dot(d, d))
    if c0 == 0.0:
        raise ConstantSeries("zero-variance series has no autocorrelation")
    rho = np.empty(max_lag + 1)
    rho[0] = 1.0
    for k in range(1, max_lag + 1):
        rho[k] = float(np.dot(d[:-k], d[k:])) / c0
    mean_abs = float(np.mean(np.abs(rho[1:])))
    return AcfResult(max_lag=max_lag, coefficients=rho, mean_abs_excl_zero=mean_abs)


def iid_score(acf: AcfResult, lag1_threshold: float = 0.2, mean_threshold: float = 0.1) -> bool:
    """Whether the ACF looks like white (i.i.d.) noise."""
    if acf.max_lag < 2:
        raise InvalidSpec("need max_lag >= 2")
    return bool(abs(acf.coefficients[1]) < lag1_threshold and acf.mean_abs_excl_zero < mean_threshold)


def _wrap_step_deg(d: np.ndarray) -> np.ndarray:
    """Map angle steps into (-180, 180]."""
    return 180.0 - (180.0 - d) % 360.0


def angle_unwrap(series: ChannelSeries) -> ChannelSeries:
    """Unwrap voltage angles so successive steps lie in (-180, 180].

    Missing samples break continuity: each valid segment restarts from its
    own first value.
    """
    if series.kind is not ChannelKind.VOLTAGE_ANGLE_DEG:
        raise WrongKind("angle_unwrap requires a voltage-angle series")
    out = series.values.copy()
    for start, length in valid_segments(series):
        if length < 2:
            continue
        seg = series.values[start : start + length]
        steps = _wrap_step_deg(np.diff(seg))
        out[start + 1 : start + length] = seg[0] + np.cumsum(steps)
    return series.with_data(out, series.missing_mask)


def angle_first_difference(series: ChannelSeries) -> ChannelSeries:
    """First-order angle difference: out[i] = in[i+1] - in[i], length N-1.

    A difference touching a missing sample is itself missing. Input is
    expected to be unwrapped already.
    """
    if series.kind is not ChannelKind.VOLTAGE_ANGLE_DEG:
        raise WrongKind("angle_first_difference requires a voltage-angle series")
    n = len(series)
    if n < 2:
        raise TooShort("need at least 2 samples")
    vals = np.diff(series.values)
    mask = series.missing_mask[:-1] | series.missing_mask[1:]
    vals[mask] = np.nan
    return series.with_data(vals, mask)


def variance_decomposition(series: ChannelSeries, order: int, outlier_cfg=None) -> VarianceComponents:
    """Split total variance into dynamics + noise + anomaly parts.

    noise comes from the median-filter residual, anomaly from the variance
    removed by replacing detected outliers with their local median, and
    dynamics is the residual (clamped at zero).
    """
    from .anomaly import OutlierConfig, detect_outliers  # circular at module level

    if outlier_cfg is None:
        outlier_cfg = OutlierConfig()
    n = len(series)
    if n <= order:
        raise OrderTooLarge(f"series length {n} must exceed order {order}")
    warm = order - 1
    sel = ~series.missing_mask
    sel[:warm] = False
    raw = series.values[sel]
    if raw.size < 2:
        raise TooShort("not enough valid samples after warm-up")
    total = float(np.var(raw, ddof=1))

    profile = extract_noise(series, order)
    report, local_median = detect_outliers(series, outlier_cfg, return_local_median=True)

    # An outlier dominates the filter residual at its own index, so the
    # noise variance is taken over residuals at non-outlier samples only;
    # the outliers' contribution is charged to the anomaly component.
    noise_sel = sel.copy()
    if report.indices.size:
        noise_sel[report.indices] = False
    nvals = profile.noise.values[noise_sel]
    noise_var = float(np.var(nvals, ddof=1)) if nvals.size > 1 else profile.std_dev**2

    replaced = series.values.copy()
    if report.indices.size:
        replaced[report.indices] = local_median[report.indices]
    anomaly_var = max(0.0, total - float(np.var(replaced[sel], ddof=1)))

    dynamics = total - noise_var - anomaly_var
    if dynamics < 0.0:
        # Estimators overlap (an outlier also inflates the residual); rescale
        # so the decomposition still sums to the measured total.
        dynamics = 0.0
        s = noise_var + anomaly_var
        if s > 0.0:
            noise_var *= total / s
            anomaly_var *= total / s
    return VarianceComponents(total=total, dynamics=dynamics, noise=noise_var, anomaly=anomaly_var)
