"""Binarization of price series, empirical moments and sliding windows."""

from __future__ import annotations

import logging
from typing import List

import numpy as np

from src.lib.errors import CapacityError, EmptyWindowError, RejectedInputError
from src.models.empirical_distribution import MAX_TABLE_SPINS, EmpiricalDistribution
from src.models.moment_set import MomentSet
from src.models.price_series import PriceSeries
from src.models.spin_matrix import SpinMatrix
from src.models.window_spec import WindowSpec

logger = logging.getLogger(__name__)


def binarize(prices: PriceSeries) -> SpinMatrix:
    """+1 where the close is strictly above the open, -1 otherwise (ties are bearish)."""
    spins = np.where(prices.close > prices.open, 1, -1).astype(np.int8)
    return SpinMatrix(prices.labels, spins, prices.dates)


def empirical_moments(spins: SpinMatrix) -> MomentSet:
    s = spins.spins.astype(np.float64)
    T = spins.n_samples
    q = s.mean(axis=0)
    Q = s.T @ s / T
    return MomentSet(q, Q, sample_count=T)


def smoothed_moments(spins: SpinMatrix) -> MomentSet:
    """Empirical moments, pseudocount-smoothed when they are saturated.

    Adding one count to each of the 2^N configurations mixes the data with the
    uniform distribution (q = 0, Q = identity), which has the closed form
    m' = T m / (T + 2^N) off the diagonal.
    """
    moments = empirical_moments(spins)
    if not moments.is_degenerate():
        return moments
    T = float(spins.n_samples)
    weight = T / (T + 2.0**spins.n_spins)
    logger.debug("smoothing saturated moments with pseudocounts (weight %.6g)", weight)
    Q = weight * moments.Q
    np.fill_diagonal(Q, 1.0)
    return MomentSet(weight * moments.q, Q, sample_count=spins.n_samples)


def configuration_codes(spins: SpinMatrix) -> np.ndarray:
    """Encode each row as an integer with bit b set when s_b = +1."""
    bits = (spins.spins > 0).astype(np.int64)
    return bits @ (np.int64(1) << np.arange(spins.n_spins, dtype=np.int64))


def empirical_distribution(spins: SpinMatrix) -> EmpiricalDistribution:
    if spins.n_spins > MAX_TABLE_SPINS:
        raise CapacityError(
            f"configuration table for N={spins.n_spins} exceeds the N <= {MAX_TABLE_SPINS} guard"
        )
    codes, counts = np.unique(configuration_codes(spins), return_counts=True)
    T = spins.n_samples
    return EmpiricalDistribution(spins.n_spins, {int(c): int(k) / T for c, k in zip(codes, counts)})


def moments_from_distribution(dist: EmpiricalDistribution) -> MomentSet:
    """Probability-weighted first and second moments of a configuration table."""
    codes = np.fromiter(dist.entries.keys(), dtype=np.int64)
    probs = np.fromiter(dist.entries.values(), dtype=np.float64)
    s = 2.0 * ((codes[:, None] >> np.arange(dist.n_spins)) & 1) - 1.0
    q = probs @ s
    Q = (s * probs[:, None]).T @ s
    return MomentSet(q, Q, sample_count=0)


def sliding_windows(spins: SpinMatrix, spec: WindowSpec) -> List[SpinMatrix]:
    """Windows of `spec.width` rows starting every `spec.shift` rows.

    Windows are views on the parent storage.
    """
    count = spec.count(spins.n_samples)
    if count == 0:
        raise EmptyWindowError(f"window width {spec.width} exceeds the {spins.n_samples} available rows")
    return [spins.rows(k * spec.shift, k * spec.shift + spec.width) for k in range(count)]


def window_starts(spins: SpinMatrix, spec: WindowSpec) -> List[str | int]:
    """Start date of every window, or the start row when the series carries no dates."""
    starts = [k * spec.shift for k in range(spec.count(spins.n_samples))]
    if spins.dates is None:
        return list(starts)
    return [spins.dates[s] for s in starts]


def concatenate(first: SpinMatrix, second: SpinMatrix) -> SpinMatrix:
    if first.labels != second.labels:
        raise RejectedInputError("cannot concatenate spin matrices with different labels")
    dates = None
    if first.dates is not None and second.dates is not None:
        dates = first.dates + second.dates
    return SpinMatrix(first.labels, np.vstack([first.spins, second.spins]), dates)
