"""Hampel outlier detection, angle spike scanning, completeness, fleet stats."""

import numpy as np
import pytest

from pmukit import (
    ChannelKind,
    OutlierConfig,
    angle_outlier_scan,
    completeness,
    detect_outliers,
    fleet_summary,
)
from pmukit.errors import InvalidSpec, WindowTooLarge

from conftest import make_series


class TestOutlierConfig:
    def test_defaults(self):
        cfg = OutlierConfig()
        assert cfg.window == 90
        assert cfg.threshold == 3.0
        assert cfg.robust_scale_factor == 1.4826

    def test_validation(self):
        with pytest.raises(InvalidSpec):
            OutlierConfig(window=2)
        with pytest.raises(InvalidSpec):
            OutlierConfig(threshold=0.0)


class TestDetectOutliers:
    def test_constant_series_no_outliers(self):
        report = detect_outliers(make_series(np.full(200, 60.0)), OutlierConfig())
        assert report.indices.size == 0
        assert report.percentage == 0.0

    def test_single_spike_found(self):
        rng = np.random.default_rng(0)
        vals = 60.0 + rng.normal(scale=1e-3, size=500)
        vals[250] += 0.1
        report = detect_outliers(make_series(vals), OutlierConfig())
        assert 250 in report.indices

    def test_zero_mad_window_flags_exact_deviants(self):
        vals = np.full(200, 5.0)
        vals[150] = 5.001
        report = detect_outliers(make_series(vals), OutlierConfig(window=90))
        assert report.indices.tolist() == [150]

    def test_missing_samples_never_flagged(self):
        rng = np.random.default_rng(1)
        vals = 60.0 + rng.normal(scale=1e-3, size=400)
        vals[200] = np.nan
        report = detect_outliers(make_series(vals), OutlierConfig())
        assert 200 not in report.indices

    def test_indices_subset_of_valid_and_sorted(self):
        rng = np.random.default_rng(2)
        vals = 60.0 + rng.normal(scale=1e-3, size=1000)
        vals[rng.choice(1000, 30, replace=False)] = np.nan
        spikes = rng.choice(np.arange(100, 1000), 10, replace=False)
        vals[spikes] = 60.0 + rng.choice([-1, 1], 10) * 0.2
        s = make_series(vals)
        report = detect_outliers(s, OutlierConfig())
        assert np.all(np.diff(report.indices) > 0)
        assert not s.missing_mask[report.indices].any()

    def test_series_shorter_than_window(self):
        with pytest.raises(WindowTooLarge):
            detect_outliers(make_series(np.ones(50)), OutlierConfig(window=90))

    def test_false_positive_rate_on_clean_gaussian(self):
        rng = np.random.default_rng(3)
        vals = 60.0 + rng.normal(scale=1e-3, size=20_000)
        report = detect_outliers(make_series(vals), OutlierConfig())
        assert report.percentage <= 0.5


class TestAngleOutlierScan:
    def test_linear_ramp_clean(self):
        t = np.arange(400) / 30.0
        s = make_series(10.0 * t - 100.0, kind=ChannelKind.VOLTAGE_ANGLE_DEG)
        report = angle_outlier_scan(s, OutlierConfig())
        assert report.indices.size == 0

    def test_100_degree_spike_flagged_once(self):
        rng = np.random.default_rng(4)
        vals = 30.0 + rng.normal(scale=0.05, size=600)
        vals[300] += 100.0
        s = make_series(vals, kind=ChannelKind.VOLTAGE_ANGLE_DEG)
        report = angle_outlier_scan(s, OutlierConfig())
        assert 300 in report.indices
        # the up-step and down-step merge into one flagged raw index
        assert not {299, 301} & set(report.indices.tolist())

    def test_invariant_to_constant_shift(self):
        rng = np.random.default_rng(5)
        vals = rng.normal(scale=0.05, size=500)
        vals[250] += 20.0
        a = make_series(vals, kind=ChannelKind.VOLTAGE_ANGLE_DEG)
        b = make_series(vals + 40.0, kind=ChannelKind.VOLTAGE_ANGLE_DEG)
        ra = angle_outlier_scan(a, OutlierConfig())
        rb = angle_outlier_scan(b, OutlierConfig())
        np.testing.assert_array_equal(ra.indices, rb.indices)

    def test_requires_angle_kind(self):
        with pytest.raises(InvalidSpec):
            angle_outlier_scan(make_series(np.ones(200)), OutlierConfig())


class TestCompleteness:
    def test_clean_series(self):
        stats = completeness(make_series(np.full(100, 60.0)))
        assert stats.dropout_rate == 0.0
        assert stats.max_gap_samples == 0
        assert stats.max_gap_seconds == 0.0
        assert stats.dropped_samples == 0

    def test_exact_rational_dropout(self):
        vals = np.full(54_000, 60.0)
        vals[1000:1540] = np.nan
        stats = completeness(make_series(vals))
        assert stats.dropped_samples == 540
        assert stats.dropout_rate == 0.01
        assert stats.dropout_rate * stats.expected_samples == stats.dropped_samples

    def test_90_sample_gap_is_three_seconds(self):
        vals = np.full(1000, 60.0)
        vals[400:490] = np.nan
        stats = completeness(make_series(vals))
        assert stats.max_gap_samples == 90
        assert stats.max_gap_seconds == 3.0

    def test_boundary_gap_counts(self):
        vals = np.full(300, 60.0)
        vals[:50] = np.nan
        assert completeness(make_series(vals)).max_gap_samples == 50

    def test_dropout_invariant_under_mask_permutation(self):
        rng = np.random.default_rng(6)
        n = 600
        mask = rng.random(n) < 0.1
        vals = np.full(n, 60.0)
        vals[mask] = np.nan
        base = completeness(make_series(vals))
        perm = rng.permutation(n)
        vals2 = np.full(n, 60.0)
        vals2[mask[perm]] = np.nan
        again = completeness(make_series(vals2))
        assert again.dropout_rate == base.dropout_rate
        # gap size is maximal when the missing samples are contiguous
        k = base.dropped_samples
        vals3 = np.full(n, 60.0)
        vals3[:k] = np.nan
        assert completeness(make_series(vals3)).max_gap_samples == k
        assert base.max_gap_samples <= k


class TestFleetSummary:
    def _channel(self, pmu_id, missing_slices=()):
        vals = np.full(900, 60.0)
        for sl in missing_slices:
            vals[sl] = np.nan
        return make_series(vals, pmu_id=pmu_id)

    def test_all_clean(self):
        fleet = fleet_summary([self._channel(f"P{i}") for i in range(3)])
        assert fleet.high_dropout_count == 0
        assert fleet.long_gap_count == 0
        assert fleet.any_missing_count == 0

    def test_high_dropout_threshold(self):
        chans = [
            self._channel("P0", [slice(100, 130)]),  # 30/900 > 2%
            self._channel("P1", [slice(100, 105)]),
            self._channel("P2"),
        ]
        fleet = fleet_summary(chans)
        assert fleet.high_dropout_count == 1
        assert fleet.any_missing_count == 2
        assert fleet.any_missing_fraction == 2 / 3

    def test_long_gap_threshold_strictly_above_three_seconds(self):
        chans = [
            self._channel("P0", [slice(100, 190)]),  # exactly 3 s: not counted
            self._channel("P1", [slice(100, 191)]),  # 91 samples > 3 s
        ]
        fleet = fleet_summary(chans)
        assert fleet.long_gap_count == 1

    def test_channels_ordered_by_pmu_id(self):
        fleet = fleet_summary([self._channel("B"), self._channel("A")])
        assert [c.pmu_id for c in fleet.channels] == ["A", "B"]

    def test_empty_fleet_rejected(self):
        with pytest.raises(InvalidSpec):
            fleet_summary([])
