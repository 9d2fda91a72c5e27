import math

import numpy as np
import pytest

from src.lib import market_analytics as ma
from src.lib.errors import MaxentError, RejectedInputError
from src.models.inversion_options import InversionOptions
from src.models.series_report import TimeSeriesReport
from src.models.spin_matrix import SpinMatrix
from src.models.window_spec import WindowSpec


def _spins(rows, dates=None):
    rows = np.asarray(rows)
    return SpinMatrix(tuple(f"s{i}" for i in range(rows.shape[1])), rows, dates)


def _report(values, gaps=()):
    values = np.asarray(values, dtype=float)
    return TimeSeriesReport(tuple(range(values.size)), values, WindowSpec(width=1, shift=1), "netOrientation", gaps)


def test_net_orientation_series():
    spins = _spins([[1, -1], [1, 1], [-1, -1], [-1, 1]])
    report = ma.net_orientation_series(spins, WindowSpec(width=2, shift=2))
    assert report.values.tolist() == [0.5, -0.5]
    assert report.window_starts == (0, 2)
    bullish = ma.net_orientation_series(_spins(np.ones((5, 3), dtype=int)), WindowSpec(width=2, shift=1))
    assert bullish.values.tolist() == [1.0] * 4


def test_mean_field_entropy_values():
    assert ma.mean_field_entropy(np.zeros(3)) == pytest.approx(3 * math.log(2))
    assert ma.mean_field_entropy(np.array([1.0, -1.0])) == 0.0
    assert ma.mean_field_entropy(np.array([0.5])) == pytest.approx(-(0.75 * math.log(0.75) + 0.25 * math.log(0.25)))


def test_mf_entropy_series_is_bounded(sampled_spins):
    report = ma.mf_entropy_series(sampled_spins, WindowSpec(width=500, shift=250))
    assert len(report.values) == WindowSpec(width=500, shift=250).count(sampled_spins.n_samples)
    assert np.all((report.values >= 0) & (report.values <= 5 * math.log(2)))


def test_orientation_histogram_bimodal_for_alternating_days():
    spins = _spins([[1, 1], [-1, -1]] * 50)
    hist = ma.orientation_histogram(spins, WindowSpec(width=10, shift=10))
    assert hist.counts.sum() == 100
    assert hist.bin_edges[0] == -1.0 and hist.bin_edges[-1] == 1.0
    assert np.all(np.diff(hist.bin_edges) > 0)
    assert hist.mode_count == 2
    assert hist.mode_centers[0] < -0.9 and hist.mode_centers[1] > 0.9


def test_orientation_histogram_unimodal_for_balanced_days():
    spins = _spins([[1, 1, 1, -1, -1, -1], [1, -1, 1, -1, 1, -1]] * 25)
    hist = ma.orientation_histogram(spins, WindowSpec(width=25, shift=25))
    assert hist.mode_count == 1


def test_orientation_histogram_single_mode_for_bullish_days():
    hist = ma.orientation_histogram(_spins(np.ones((50, 4), dtype=int)), WindowSpec(width=25, shift=25))
    assert hist.mode_count == 1
    assert hist.mode_centers[0] > 0.9


def test_orientation_histogram_needs_disjoint_windows():
    with pytest.raises(RejectedInputError):
        ma.orientation_histogram(_spins(np.ones((50, 2), dtype=int)), WindowSpec(width=25, shift=5))


def test_map_windows_turns_failures_into_gaps():
    spins = _spins(np.ones((6, 2), dtype=int))
    calls = []

    def fn(window):
        calls.append(window.n_samples)
        if len(calls) == 2:
            raise MaxentError("boom")
        return 1.0

    values, gaps = ma.map_windows(spins, WindowSpec(width=2, shift=2), fn)
    assert gaps == (1,)
    assert math.isnan(values[1])
    assert values[0] == values[2] == 1.0


def test_aggregate_preference_series(sampled_spins):
    spec = WindowSpec(width=1000, shift=1000)
    report = ma.aggregate_preference_series(sampled_spins, spec, InversionOptions(method="nmf"))
    assert report.kind == "aggregatePreference"
    assert len(report.values) == 4
    assert np.all(np.isfinite(report.values))
    assert report.metadata["inversion"]["method"] == "nmf"


def test_trace_deviation_is_centered(sampled_spins):
    report = ma.trace_deviation_series(sampled_spins, WindowSpec(width=1000, shift=500))
    assert report.metadata["inversion"]["method"] == "tanaka"
    assert report.metadata["mean_trace"] < 0
    assert abs(np.nanmean(report.values)) < 1e-12


def test_smooth_series_shrinks_at_the_ends():
    smoothed = ma.smooth_series(_report([0.0, 3.0, 6.0, 9.0]), 1)
    assert smoothed.values.tolist() == [1.5, 3.0, 6.0, 7.5]
    assert smoothed.metadata["smooth"] == 1


def test_smooth_series_keeps_gaps():
    smoothed = ma.smooth_series(_report([1.0, math.nan, 3.0], gaps=(1,)), 1)
    assert smoothed.values[0] == 1.0 and smoothed.values[2] == 3.0
    assert math.isnan(smoothed.values[1])
    assert smoothed.gaps == (1,)


def test_normalize_series():
    out = ma.normalize_series(_report([1.0, 2.0, 3.0]))
    assert out.values.mean() == pytest.approx(0.0)
    assert np.sqrt(np.mean(out.values**2)) == pytest.approx(1.0)
    flat = ma.normalize_series(_report([2.0, 2.0, 2.0]))
    assert flat.values.tolist() == [0.0, 0.0, 0.0]
    assert flat.metadata["zero_variance"] is True


def test_build_series_dispatch(sampled_spins):
    spec = WindowSpec(width=2000, shift=2000)
    assert ma.build_series("netOrientation", sampled_spins, spec).kind == "netOrientation"
    assert ma.build_series("mstLengthDeviation", sampled_spins, spec, InversionOptions(method="nmf")).kind == (
        "mstLengthDeviation"
    )
    with pytest.raises(RejectedInputError):
        ma.build_series("volatility", sampled_spins, spec)
