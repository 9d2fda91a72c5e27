import math

import numpy as np
import pytest

from src.lib import spin_data
from src.lib.errors import EmptyWindowError, RejectedInputError
from src.models.price_series import PriceSeries
from src.models.spin_matrix import SpinMatrix
from src.models.window_spec import WindowSpec


def _spins(rows, dates=None):
    rows = np.asarray(rows)
    return SpinMatrix(tuple(f"s{i}" for i in range(rows.shape[1])), rows, dates)


def test_binarize_counts_ties_as_bearish():
    prices = PriceSeries(
        ("A", "B"),
        ("2020-01-02", "2020-01-03"),
        [[1.0, 2.0], [3.0, 3.0]],
        [[2.0, 1.0], [3.0, 4.0]],
    )
    spins = spin_data.binarize(prices)
    assert spins.spins.tolist() == [[1, -1], [-1, 1]]
    assert spins.dates == prices.dates
    assert spins.labels == ("A", "B")


def test_price_series_rejects_nonpositive_prices():
    with pytest.raises(RejectedInputError) as exc:
        PriceSeries(("A",), ("d1", "d2"), [[1.0], [0.0]], [[1.0], [1.0]])
    assert exc.value.row == 1


def test_spin_matrix_rejects_zero_entries():
    with pytest.raises(RejectedInputError) as exc:
        _spins([[1, -1], [0, 1]])
    assert (exc.value.row, exc.value.column) == (1, 0)


def test_empirical_moments():
    m = spin_data.empirical_moments(_spins([[1, 1], [1, -1], [-1, -1], [1, 1]]))
    assert m.q.tolist() == [0.5, 0.0]
    assert m.Q[0, 1] == pytest.approx(0.5)
    assert m.Q[0, 0] == 1.0
    assert m.sample_count == 4


def test_smoothed_moments_only_touches_saturated_data():
    varied = _spins([[1, 1], [1, -1], [-1, -1], [-1, 1]])
    assert np.array_equal(spin_data.smoothed_moments(varied).q, spin_data.empirical_moments(varied).q)

    frozen = _spins([[1], [1], [1], [1]])
    smoothed = spin_data.smoothed_moments(frozen)
    # T=4 observations plus one pseudocount for each of 2 configurations
    assert smoothed.q[0] == pytest.approx(4.0 / 6.0)
    assert not smoothed.is_degenerate()


def test_configuration_codes_use_bit_per_bullish_spin():
    codes = spin_data.configuration_codes(_spins([[1, -1, 1], [-1, -1, -1], [1, 1, 1]]))
    assert codes.tolist() == [5, 0, 7]


def test_empirical_distribution_and_moments_agree():
    spins = _spins([[1, 1, -1], [1, -1, -1], [1, 1, -1], [-1, 1, 1]])
    dist = spin_data.empirical_distribution(spins)
    assert math.fsum(dist.entries.values()) == pytest.approx(1.0)
    assert dist.entries[spin_data.configuration_codes(spins)[0]] == pytest.approx(0.5)
    m = spin_data.moments_from_distribution(dist)
    direct = spin_data.empirical_moments(spins)
    assert np.allclose(m.q, direct.q)
    assert np.allclose(m.Q, direct.Q)


def test_sliding_windows_are_views():
    spins = _spins(np.where(np.arange(20).reshape(10, 2) % 3 == 0, 1, -1))
    windows = spin_data.sliding_windows(spins, WindowSpec(width=4, shift=3))
    assert len(windows) == 3
    assert [w.n_samples for w in windows] == [4, 4, 4]
    assert np.array_equal(windows[1].spins, spins.spins[3:7])
    assert np.shares_memory(windows[1].spins, spins.spins)


def test_window_starts_use_dates_when_present():
    dates = tuple(f"2020-01-{d:02d}" for d in range(1, 7))
    spins = _spins(np.ones((6, 2), dtype=int), dates)
    assert spin_data.window_starts(spins, WindowSpec(width=2, shift=2)) == ["2020-01-01", "2020-01-03", "2020-01-05"]
    assert spin_data.window_starts(_spins(np.ones((6, 2), dtype=int)), WindowSpec(width=3, shift=3)) == [0, 3]


def test_window_wider_than_data_is_rejected():
    with pytest.raises(EmptyWindowError):
        spin_data.sliding_windows(_spins(np.ones((3, 2), dtype=int)), WindowSpec(width=4, shift=1))


def test_concatenate_requires_matching_labels():
    a = _spins([[1, -1]])
    b = SpinMatrix(("x", "y"), np.array([[1, 1]]))
    assert spin_data.concatenate(a, a).n_samples == 2
    with pytest.raises(RejectedInputError):
        spin_data.concatenate(a, b)
