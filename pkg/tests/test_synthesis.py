"""Baseline generation and seeded feature injection."""

import math

import numpy as np
import pytest

from pmukit import (
    BaselineSpec,
    ChannelKind,
    InjectionSpec,
    MissingInjection,
    ModeInjection,
    OutlierInjection,
    SamplingSpec,
    completeness,
    derive_channel_seed,
    estimate_modes,
    generate_baseline,
    inject_missing,
    inject_modes,
    inject_noise,
    inject_outliers,
    inject_time_skew,
    run_pipeline,
    windowed_stats,
)
from pmukit.errors import AboveNyquist, DegenerateBaseline, InvalidSpec, OutOfRange

from conftest import make_series

FLAT_60HZ = BaselineSpec(
    kind=ChannelKind.FREQUENCY_HZ, duration_s=60.0, spec=SamplingSpec(), nominal_value=60.0
)


class TestBaselineSpec:
    def test_sample_count(self):
        assert FLAT_60HZ.n_samples == 1800

    def test_trend_breakpoints_validated(self):
        with pytest.raises(InvalidSpec):
            BaselineSpec(
                kind=ChannelKind.FREQUENCY_HZ,
                duration_s=10.0,
                trend=((5.0, 0.0), (2.0, 1.0)),
            )
        with pytest.raises(InvalidSpec):
            BaselineSpec(
                kind=ChannelKind.FREQUENCY_HZ,
                duration_s=10.0,
                trend=((0.0, 0.0), (20.0, 1.0)),
            )

    def test_negative_variability_rejected(self):
        with pytest.raises(InvalidSpec):
            BaselineSpec(kind=ChannelKind.FREQUENCY_HZ, duration_s=1.0, dynamics_variability=-1.0)


class TestGenerateBaseline:
    def test_flat_spec_gives_constant(self):
        series, _ = generate_baseline(FLAT_60HZ, 0)
        assert np.all(series.values == 60.0)
        assert not series.missing_mask.any()

    def test_trend_applied_piecewise_linearly(self):
        spec = BaselineSpec(
            kind=ChannelKind.VOLTAGE_MAGNITUDE_PU,
            duration_s=10.0,
            nominal_value=1.0,
            trend=((0.0, 0.0), (10.0, 0.3)),
        )
        series, _ = generate_baseline(spec, 0)
        t = np.arange(300) / 30.0
        np.testing.assert_allclose(series.values, 1.0 + 0.03 * t, atol=1e-12)

    def test_variability_calibration(self):
        spec = BaselineSpec(
            kind=ChannelKind.VOLTAGE_MAGNITUDE_PU,
            duration_s=60.0,
            dynamics_variability=1e-4,
        )
        measured = []
        for seed in range(10):
            series, _ = generate_baseline(spec, seed)
            measured.append(windowed_stats(series, 5).average_variability)
        avg = float(np.mean(measured))
        assert 0.5e-4 <= avg <= 2.0e-4

    def test_same_seed_bit_identical(self):
        spec = BaselineSpec(
            kind=ChannelKind.FREQUENCY_HZ, duration_s=30.0, dynamics_variability=1e-4
        )
        a, _ = generate_baseline(spec, 42)
        b, _ = generate_baseline(spec, 42)
        np.testing.assert_array_equal(a.values, b.values)

    def test_different_seeds_differ(self):
        spec = BaselineSpec(
            kind=ChannelKind.FREQUENCY_HZ, duration_s=30.0, dynamics_variability=1e-4
        )
        a, _ = generate_baseline(spec, 1)
        b, _ = generate_baseline(spec, 2)
        assert not np.array_equal(a.values, b.values)


def test_derive_channel_seed_stable_and_distinct():
    s1 = derive_channel_seed(1234, "PMU1")
    assert s1 == derive_channel_seed(1234, "PMU1")
    assert s1 != derive_channel_seed(1234, "PMU2")
    assert s1 != derive_channel_seed(1235, "PMU1")
    assert 0 <= s1 < 2**64


class TestInjectModes:
    def test_undamped_mode_is_exact_cosine(self):
        series, _ = generate_baseline(FLAT_60HZ, 0)
        out = inject_modes(series, [ModeInjection(0.3, 0.05)])
        t = np.arange(len(series)) / 30.0
        np.testing.assert_allclose(
            out.values - series.values, 0.05 * np.cos(2 * np.pi * 0.3 * t), atol=1e-12
        )

    def test_zero_outside_active_interval(self):
        series, _ = generate_baseline(FLAT_60HZ, 0)
        out = inject_modes(series, [ModeInjection(0.3, 0.05, start_s=20.0, duration_s=10.0)])
        delta = out.values - series.values
        assert np.all(delta[: 20 * 30] == 0.0)
        assert np.all(delta[30 * 30 :] == 0.0)
        assert np.any(delta[20 * 30 : 30 * 30] != 0.0)

    def test_damping_ratio_recovered_by_estimator(self):
        series, _ = generate_baseline(FLAT_60HZ, 0)
        out = inject_modes(series, [ModeInjection(0.5, 0.5, damping_factor=0.05)])
        modes = estimate_modes(out.values[:300], 30.0)
        top = min(modes, key=lambda m: abs(m.frequency_hz - 0.5))
        assert abs(top.damping_factor - 0.05) <= 0.005

    def test_above_nyquist_rejected(self):
        series, _ = generate_baseline(FLAT_60HZ, 0)
        with pytest.raises(AboveNyquist):
            inject_modes(series, [ModeInjection(15.0, 0.1)])


class TestInjectNoise:
    def test_realized_variance_matches_target(self):
        spec = BaselineSpec(
            kind=ChannelKind.FREQUENCY_HZ,
            duration_s=60.0,
            nominal_value=60.0,
            trend=((0.0, 0.0), (60.0, 0.02)),
        )
        series, _ = generate_baseline(spec, 0)
        base_var = np.var(series.values, ddof=1)
        out, realized = inject_noise(series, 40.0, 7)
        target = base_var / 10**4.0
        assert abs(realized - target) <= 0.15 * target

    def test_mean_preserved(self):
        spec = BaselineSpec(
            kind=ChannelKind.FREQUENCY_HZ,
            duration_s=60.0,
            nominal_value=60.0,
            trend=((0.0, 0.0), (60.0, 0.02)),
        )
        series, _ = generate_baseline(spec, 0)
        out, realized = inject_noise(series, 30.0, 11)
        n = len(series)
        assert abs(out.values.mean() - series.values.mean()) <= 3.0 * math.sqrt(realized / n)

    def test_infinite_target_is_identity(self):
        series, _ = generate_baseline(FLAT_60HZ, 0)
        out, realized = inject_noise(series, math.inf, 3)
        np.testing.assert_array_equal(out.values, series.values)
        assert realized == 0.0

    def test_zero_variance_baseline_rejected(self):
        series, _ = generate_baseline(FLAT_60HZ, 0)
        with pytest.raises(DegenerateBaseline):
            inject_noise(series, 40.0, 3)


class TestInjectOutliers:
    def _noisy(self, seed=0):
        spec = BaselineSpec(
            kind=ChannelKind.FREQUENCY_HZ,
            duration_s=60.0,
            nominal_value=60.0,
            trend=((0.0, 0.0), (60.0, 0.02)),
        )
        series, _ = generate_baseline(spec, seed)
        series, _ = inject_noise(series, 40.0, seed + 100)
        return series

    def test_exact_count(self):
        series = self._noisy()
        out, idx, dev = inject_outliers(series, 0.01, 10.0, 5)
        assert idx.size == 18  # round(0.01 * 1800)
        assert np.all(np.diff(idx) > 0)
        assert dev.size == idx.size

    def test_zero_rate_identity(self):
        series = self._noisy()
        out, idx, _ = inject_outliers(series, 0.0, 10.0, 5)
        assert idx.size == 0
        np.testing.assert_array_equal(out.values, series.values)

    def test_only_spiked_indices_change(self):
        series = self._noisy()
        out, idx, dev = inject_outliers(series, 0.005, 10.0, 5)
        delta = out.values - series.values
        changed = np.flatnonzero(delta != 0.0)
        np.testing.assert_array_equal(changed, idx)
        np.testing.assert_allclose(delta[idx], dev, atol=0)

    def test_validation(self):
        with pytest.raises(InvalidSpec):
            OutlierInjection(rate=1.5)
        with pytest.raises(InvalidSpec):
            OutlierInjection(rate=0.01, magnitude_sigmas=2.0)


class TestInjectMissing:
    def test_exact_total_and_gap_cap(self):
        series, _ = generate_baseline(FLAT_60HZ, 0)
        out, mask = inject_missing(series, 0.05, 9, None, 3)
        assert int(mask.sum()) == 90  # round(0.05 * 1800)
        from pmukit.signal_model import mask_runs

        runs = mask_runs(mask)
        assert max(length for _, length in runs) <= 9
        np.testing.assert_array_equal(out.missing_mask, mask)

    def test_never_alters_surviving_values(self):
        series, _ = generate_baseline(FLAT_60HZ, 0)
        out, mask = inject_missing(series, 0.1, 30, None, 4)
        np.testing.assert_array_equal(out.values[~mask], series.values[~mask])

    def test_filler_value_written_verbatim(self):
        series, _ = generate_baseline(FLAT_60HZ, 0)
        out, mask = inject_missing(series, 0.02, 5, 9999.0, 4)
        assert np.all(out.values[mask] == 9999.0)

    def test_zero_rate_identity(self):
        series, _ = generate_baseline(FLAT_60HZ, 0)
        out, mask = inject_missing(series, 0.0, 5, None, 4)
        assert not mask.any()
        np.testing.assert_array_equal(out.values, series.values)

    def test_completeness_round_trip(self):
        series, _ = generate_baseline(FLAT_60HZ, 0)
        out, _ = inject_missing(series, 0.05, 9, None, 8)
        assert completeness(out).dropout_rate == 0.05

    def test_validation(self):
        with pytest.raises(InvalidSpec):
            MissingInjection(dropout_rate=1.5)
        with pytest.raises(InvalidSpec):
            MissingInjection(dropout_rate=0.1, max_gap_samples=0)


class TestInjectTimeSkew:
    def test_zero_skew_identity(self):
        series, _ = generate_baseline(FLAT_60HZ, 0)
        assert inject_time_skew(series, 0.0) is series

    def test_ramp_slope_scaled(self):
        t = np.arange(300) / 30.0
        series = make_series(10.0 * t)
        out = inject_time_skew(series, 0.01)
        expected = 10.0 * t / 1.01
        np.testing.assert_allclose(out.values[:-2], expected[:-2], atol=1e-9)

    def test_apparent_frequency_divided_by_scale(self):
        t = np.arange(1800) / 30.0
        series = make_series(60.0 + 0.1 * np.cos(2 * np.pi * 0.5 * t))
        out = inject_time_skew(series, 0.01)
        modes = estimate_modes(out.values[:300], 30.0)
        top = min(modes, key=lambda m: abs(m.frequency_hz - 0.5))
        assert abs(top.frequency_hz - 0.5 / 1.01) <= 0.002

    def test_skew_below_minus_one_rejected(self):
        series, _ = generate_baseline(FLAT_60HZ, 0)
        with pytest.raises(OutOfRange):
            inject_time_skew(series, -1.5)


class TestRunPipeline:
    FULL = InjectionSpec(
        seed=99,
        noise_snr_db=35.0,
        outlier=OutlierInjection(rate=0.01, magnitude_sigmas=10.0),
        missing=MissingInjection(dropout_rate=0.02, max_gap_samples=15),
        skew_s_per_s=0.001,
        modes=(ModeInjection(0.3, 0.05), ModeInjection(0.5, 0.03, damping_factor=0.05)),
    )
    TRENDY = BaselineSpec(
        kind=ChannelKind.FREQUENCY_HZ,
        duration_s=60.0,
        nominal_value=60.0,
        trend=((0.0, 0.0), (60.0, 0.02)),
        dynamics_variability=1e-6,
    )

    def test_no_injection_returns_baseline(self):
        base, _ = generate_baseline(self.TRENDY, 0)
        out, record = run_pipeline(self.TRENDY, None)
        np.testing.assert_array_equal(out.values, base.values)
        assert record.injection is None

    def test_full_feature_run_deterministic(self):
        a, ra = run_pipeline(self.TRENDY, self.FULL, pmu_id="P1")
        b, rb = run_pipeline(self.TRENDY, self.FULL, pmu_id="P1")
        np.testing.assert_array_equal(a.values, b.values)
        np.testing.assert_array_equal(a.missing_mask, b.missing_mask)
        np.testing.assert_array_equal(ra.outlier_indices, rb.outlier_indices)
        np.testing.assert_array_equal(ra.missing_mask, rb.missing_mask)

    def test_record_holds_ground_truth(self):
        out, record = run_pipeline(self.TRENDY, self.FULL)
        assert record.injected_modes == self.FULL.modes
        assert record.realized_noise_variance > 0.0
        assert record.outlier_indices.size == 18
        assert int(record.missing_mask.sum()) == 36
        assert record.skew_s_per_s == 0.001
        np.testing.assert_array_equal(out.missing_mask, record.missing_mask)

    def test_completeness_unaffected_by_other_features(self):
        plain = InjectionSpec(seed=7, missing=MissingInjection(dropout_rate=0.02, max_gap_samples=15))
        loaded = InjectionSpec(
            seed=7,
            noise_snr_db=30.0,
            outlier=OutlierInjection(rate=0.01, magnitude_sigmas=10.0),
            missing=MissingInjection(dropout_rate=0.02, max_gap_samples=15),
        )
        a, _ = run_pipeline(self.TRENDY, plain)
        b, _ = run_pipeline(self.TRENDY, loaded)
        assert completeness(a).dropout_rate == completeness(b).dropout_rate == 0.02
