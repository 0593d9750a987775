"""Seeded generation of clean baselines and injection of measured PMU
data features: ambient/disturbance modes, noise at a target SNR, point
outliers, clock-drift skew, and missing-data gaps.

Features are always applied in the fixed order
modes -> noise -> outliers -> skew -> missing so the recorded ground truth
stays well-defined. Everything is deterministic given (specs, seed).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import (
    AboveNyquist,
    DegenerateBaseline,
    InfeasiblePlacement,
    InvalidSpec,
    OutOfRange,
)
from .signal_model import (
    ChannelKind,
    ChannelSeries,
    FillerPolicy,
    SamplingSpec,
    new_channel_series,
)

AR1_REVERSION = 0.95  # per-sample autoregressive coefficient of the baseline


@dataclass(frozen=True)
class BaselineSpec:
    kind: ChannelKind
    duration_s: float
    spec: SamplingSpec = SamplingSpec()
    nominal_value: float = 1.0
    trend: tuple[tuple[float, float], ...] = ()
    dynamics_variability: float = 0.0  # target 5-sample-window variance

    def __post_init__(self):
        if not (self.duration_s > 0):
            raise InvalidSpec("duration_s must be positive")
        if self.dynamics_variability < 0:
            raise InvalidSpec("dynamics_variability must be nonnegative")
        times = [t for t, _ in self.trend]
        if any(b >= a for a, b in zip(times[1:], times)):
            raise InvalidSpec("trend breakpoint times must be strictly increasing")
        if times and (times[0] < 0 or times[-1] > self.duration_s):
            raise InvalidSpec("trend breakpoints must lie within [0, duration_s]")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration_s * self.spec.rate_fps))


@dataclass(frozen=True)
class ModeInjection:
    frequency_hz: float
    amplitude: float
    damping_factor: float = 0.0
    start_s: float = 0.0
    duration_s: float | None = None  # None = until the end of the series


@dataclass(frozen=True)
class OutlierInjection:
    rate: float
    magnitude_sigmas: float = 10.0

    def __post_init__(self):
        if not (0 <= self.rate <= 1):
            raise InvalidSpec("outlier rate must lie in [0, 1]")
        if self.magnitude_sigmas < 3:
            raise InvalidSpec("magnitude_sigmas must be >= 3")


@dataclass(frozen=True)
class MissingInjection:
    dropout_rate: float
    max_gap_samples: int = 1
    filler_value: float | None = None  # None = NaN sentinel

    def __post_init__(self):
        if not (0 <= self.dropout_rate <= 1):
            raise InvalidSpec("dropout_rate must lie in [0, 1]")
        if self.max_gap_samples < 1:
            raise InvalidSpec("max_gap_samples must be >= 1")


@dataclass(frozen=True)
class InjectionSpec:
    seed: int = 0
    noise_snr_db: float | None = None
    outlier: OutlierInjection | None = None
    missing: MissingInjection | None = None
    skew_s_per_s: float | None = None
    modes: tuple[ModeInjection, ...] = ()


@dataclass
class GenerationRecord:
    """Ground truth written by the injector itself, never re-measured."""

    baseline: BaselineSpec
    injection: InjectionSpec | None = None
    injected_modes: tuple[ModeInjection, ...] = ()
    realized_noise_variance: float | None = None
    outlier_indices: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    outlier_deviations: np.ndarray = field(default_factory=lambda: np.empty(0))
    missing_mask: np.ndarray | None = None
    skew_s_per_s: float | None = None


def derive_channel_seed(seed: int, pmu_id: str) -> int:
    """Stable per-channel seed: fleet seed XOR first 8 bytes of SHA-256(pmu_id)."""
    digest = hashlib.sha256(pmu_id.encode("utf-8")).digest()
    return (int(seed) ^ int.from_bytes(digest[:8], "little")) & 0xFFFFFFFFFFFFFFFF


def _window_variance_factor(phi: float, m: int) -> float:
    # E[unbiased m-sample window variance] = sigma_x^2 * factor for an AR(1)
    # process with per-sample coefficient phi.
    acc = sum((m - k) * phi**k for k in range(1, m))
    return 1.0 - 2.0 / (m * (m - 1)) * acc


def generate_baseline(spec: BaselineSpec, seed: int, pmu_id: str = "") -> tuple[ChannelSeries, GenerationRecord]:
    """Nominal + piecewise-linear trend + mean-reverting stochastic component.

    The AR(1) innovation scale is calibrated so the expected variance over
    non-overlapping 5-sample windows equals dynamics_variability.
    """
    n = spec.n_samples
    if n < 1:
        raise InvalidSpec("duration too short for one sample")
    t = np.arange(n) / spec.spec.rate_fps
    values = np.full(n, float(spec.nominal_value))
    if spec.trend:
        xs = np.array([p[0] for p in spec.trend])
        ys = np.array([p[1] for p in spec.trend])
        values = values + np.interp(t, xs, ys)
    if spec.dynamics_variability > 0:
        rng = np.random.default_rng(seed)
        sigma_x = math.sqrt(spec.dynamics_variability / _window_variance_factor(AR1_REVERSION, 5))
        w = rng.normal(scale=sigma_x * math.sqrt(1.0 - AR1_REVERSION**2), size=n)
        w[0] = rng.normal(scale=sigma_x)  # stationary start
        values = values + lfilter([1.0], [1.0, -AR1_REVERSION], w)
    series = new_channel_series(spec.kind, spec.spec, values, pmu_id=pmu_id)
    return series, GenerationRecord(baseline=spec)


def inject_modes(series: ChannelSeries, modes) -> ChannelSeries:
    """Add damped sinusoids over their active intervals."""
    nyquist = series.spec.rate_fps / 2.0
    t = np.arange(len(series)) / series.spec.rate_fps
    add = np.zeros(len(series))
    for mode in modes:
        if mode.frequency_hz >= nyquist:
            raise AboveNyquist(f"mode at {mode.frequency_hz} Hz exceeds Nyquist {nyquist} Hz")
        end = series.duration_s if mode.duration_s is None else mode.start_s + mode.duration_s
        tau = t - mode.start_s
        active = (tau >= 0) & (t < end)
        omega_d = 2.0 * math.pi * mode.frequency_hz
        zeta = mode.damping_factor
        if abs(zeta) >= 1 or omega_d == 0:
            alpha = 0.0
        else:
            alpha = zeta * omega_d / math.sqrt(1.0 - zeta**2)
        add[active] += mode.amplitude * np.exp(-alpha * tau[active]) * np.cos(omega_d * tau[active])
    values = series.values.copy()
    sel = ~series.missing_mask
    values[sel] += add[sel]
    return series.with_data(values)


def inject_noise(series: ChannelSeries, target_snr_db: float, rng) -> tuple[ChannelSeries, float]:
    """Add i.i.d. zero-mean Gaussian noise hitting a target SNR.

    Returns the new series and the realized noise variance.
    """
    rng = np.random.default_rng(rng)
    if target_snr_db is None or math.isinf(target_snr_db):
        return series, 0.0
    sel = ~series.missing_mask
    base = series.values[sel]
    var = float(np.var(base, ddof=1)) if base.size > 1 else 0.0
    if var == 0.0:
        raise DegenerateBaseline("cannot target an SNR on a zero-variance baseline")
    noise_var = var / 10.0 ** (target_snr_db / 10.0)
    noise = rng.normal(scale=math.sqrt(noise_var), size=int(np.count_nonzero(sel)))
    values = series.values.copy()
    values[sel] += noise
    realized = float(np.var(noise, ddof=1)) if noise.size > 1 else 0.0
    return series.with_data(values), realized


def robust_sigma(values: np.ndarray) -> float:
    """1.4826 * MAD, falling back to the sample std for degenerate data."""
    med = float(np.median(values))
    mad = float(np.median(np.abs(values - med)))
    if mad > 0:
        return 1.4826 * mad
    std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return std if std > 0 else 1.0


def inject_outliers(
    series: ChannelSeries, rate: float, magnitude_sigmas: float, rng
) -> tuple[ChannelSeries, np.ndarray, np.ndarray]:
    """Spike round(rate * N) distinct non-missing samples by +-k robust sigmas.

    Returns (series, sorted spiked indices, applied deviations).
    """
    rng = np.random.default_rng(rng)
    n = len(series)
    count = int(round(rate * n))
    if count == 0:
        return series, np.empty(0, dtype=np.int64), np.empty(0)
    valid = np.flatnonzero(~series.missing_mask)
    if count > valid.size:
        raise InfeasiblePlacement(f"cannot spike {count} of {valid.size} valid samples")
    sigma = robust_sigma(series.values[valid])
    indices = np.sort(rng.choice(valid, size=count, replace=False))
    signs = rng.choice([-1.0, 1.0], size=count)
    deviations = signs * magnitude_sigmas * sigma
    values = series.values.copy()
    values[indices] += deviations
    return series.with_data(values), indices, deviations


def inject_missing(
    series: ChannelSeries,
    dropout_rate: float,
    max_gap_samples: int,
    filler_value: float | None,
    rng,
) -> tuple[ChannelSeries, np.ndarray]:
    """Drop round(rate * N) samples in contiguous gaps of length <= max_gap.

    Gap lengths are drawn uniformly from [1, max_gap_samples] (the last gap
    truncated to hit the exact count) and placed uniformly at random with at
    least one valid sample between gaps. Returns (series, injected mask).
    """
    rng = np.random.default_rng(rng)
    n = len(series)
    total = int(round(dropout_rate * n))
    if total == 0:
        return series, np.zeros(n, dtype=bool)
    gaps: list[int] = []
    remaining = total
    while remaining > 0:
        g = min(int(rng.integers(1, max_gap_samples + 1)), remaining)
        gaps.append(g)
        remaining -= g
    k = len(gaps)
    free = n - total - (k - 1)
    if free < 0:
        raise InfeasiblePlacement(
            f"cannot place {total} missing samples in {k} gaps of <= {max_gap_samples} within {n} samples"
        )
    # Uniform composition of the free samples into k+1 slack blocks.
    bars = np.sort(rng.choice(free + k, size=k, replace=False))
    slack_before = bars - np.arange(k)
    mask = np.zeros(n, dtype=bool)
    pos = 0
    prev_slack = 0
    for i, g in enumerate(gaps):
        pos += int(slack_before[i]) - prev_slack + (1 if i > 0 else 0)
        mask[pos : pos + g] = True
        pos += g
        prev_slack = int(slack_before[i])
    values = series.values.copy()
    values[mask] = np.nan if filler_value is None else float(filler_value)
    return series.with_data(values, series.missing_mask | mask), mask


def inject_time_skew(series: ChannelSeries, skew_s_per_s: float) -> ChannelSeries:
    """Resample as if the PMU clock ran fast by (1 + skew).

    The reported timestamps are unchanged; the values are what a drifting
    clock would have captured, i.e. the signal evaluated at t / (1 + skew).
    An apparent frequency f becomes f / (1 + skew).
    """
    if skew_s_per_s == 0:
        return series
    scale = 1.0 + skew_s_per_s
    if scale <= 0:
        raise OutOfRange("skew must exceed -1")
    n = len(series)
    idx = np.arange(n) / scale
    if idx[-1] > n - 1 + 0.5:
        raise OutOfRange("skew shifts samples beyond the recorded range")
    idx = np.minimum(idx, n - 1)
    values = np.interp(idx, np.arange(n), series.values)
    return series.with_data(values, series.missing_mask)


def run_pipeline(baseline: BaselineSpec, inject: InjectionSpec | None, pmu_id: str = "") -> tuple[ChannelSeries, GenerationRecord]:
    """Baseline generation plus feature infusion in the fixed order."""
    seed = inject.seed if inject is not None else 0
    series, record = generate_baseline(baseline, seed, pmu_id=pmu_id)
    if inject is None:
        return series, record
    record.injection = inject
    rng = np.random.default_rng(seed)
    if inject.modes:
        series = inject_modes(series, inject.modes)
        record.injected_modes = tuple(inject.modes)
    if inject.noise_snr_db is not None:
        series, realized = inject_noise(series, inject.noise_snr_db, rng)
        record.realized_noise_variance = realized
    if inject.outlier is not None:
        series, idx, dev = inject_outliers(series, inject.outlier.rate, inject.outlier.magnitude_sigmas, rng)
        record.outlier_indices = idx
        record.outlier_deviations = dev
    if inject.skew_s_per_s is not None and inject.skew_s_per_s != 0:
        series = inject_time_skew(series, inject.skew_s_per_s)
        record.skew_s_per_s = inject.skew_s_per_s
    if inject.missing is not None:
        series, mask = inject_missing(
            series,
            inject.missing.dropout_rate,
            inject.missing.max_gap_samples,
            inject.missing.filler_value,
            rng,
        )
        record.missing_mask = mask
    return series, record
