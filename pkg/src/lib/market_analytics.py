"""Sliding-window market-state indicators.

Every series is a TimeSeriesReport with one value per window. Windows whose
computation fails numerically become gaps (NaN plus an index in `gaps`).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.ndimage import gaussian_filter1d
from scipy.special import entr

from src.lib.errors import InsufficientDataError, MaxentError, RejectedInputError
from src.lib.inverter_registry import get_inverter
from src.lib.spin_data import sliding_windows, window_starts
from src.models.inversion_options import InversionOptions
from src.models.series_report import OrientationHistogram, SeriesKind, TimeSeriesReport
from src.models.spin_matrix import SpinMatrix
from src.models.window_spec import WindowSpec

logger = logging.getLogger(__name__)

MODE_MASS_FRACTION = 0.05

# (width, shift) in trading days when a window command names only the kind
DEFAULT_WINDOWS: Dict[str, Tuple[int, int]] = {
    "netOrientation": (300, 1),
    "orientationHistogram": (25, 25),
    "mfEntropy": (300, 1),
    "aggregatePreference": (200, 2),
    "traceDeviation": (200, 5),
    "mstLengthDeviation": (100, 10),
}

WindowFn = Callable[[SpinMatrix], float]


def map_windows(
    spins: SpinMatrix, spec: WindowSpec, fn: WindowFn, threads: int = 1
) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """Apply `fn` to every window, in window order.

    Library errors and non-finite results turn into gaps rather than
    aborting the series.
    """
    windows = sliding_windows(spins, spec)

    def run(item: Tuple[int, SpinMatrix]) -> float:
        k, window = item
        try:
            value = float(fn(window))
        except (MaxentError, ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
            logger.warning("window %d: %s; recorded as a gap", k, exc)
            return math.nan
        if not math.isfinite(value):
            logger.warning("window %d: non-finite value; recorded as a gap", k)
            return math.nan
        return value

    items = list(enumerate(windows))
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(run, items))
    else:
        values = [run(item) for item in items]
    arr = np.asarray(values, dtype=np.float64)
    gaps = tuple(int(k) for k in np.flatnonzero(np.isnan(arr)))
    return arr, gaps


def make_report(
    spins: SpinMatrix,
    spec: WindowSpec,
    kind: SeriesKind,
    values: np.ndarray,
    gaps: Tuple[int, ...] = (),
    metadata: Optional[Dict[str, Any]] = None,
) -> TimeSeriesReport:
    return TimeSeriesReport(tuple(window_starts(spins, spec)), values, spec, kind, gaps, dict(metadata or {}))


def net_orientation(window: SpinMatrix) -> float:
    return float(window.spins.mean(dtype=np.float64))


def net_orientation_series(spins: SpinMatrix, spec: WindowSpec) -> TimeSeriesReport:
    """Mean of all N * width spins of each window."""
    values, gaps = map_windows(spins, spec, net_orientation)
    return make_report(spins, spec, "netOrientation", values, gaps)


def mean_field_entropy(q: np.ndarray) -> float:
    """S_MF = sum_i H((1 + q_i) / 2) in nats, with 0 ln 0 = 0."""
    q = np.clip(np.asarray(q, dtype=np.float64), -1.0, 1.0)
    return float(np.sum(entr((1.0 + q) / 2.0) + entr((1.0 - q) / 2.0)))


def mf_entropy_series(spins: SpinMatrix, spec: WindowSpec) -> TimeSeriesReport:
    values, gaps = map_windows(spins, spec, lambda w: mean_field_entropy(w.spins.mean(axis=0, dtype=np.float64)))
    return make_report(spins, spec, "mfEntropy", values, gaps)


def _histogram_sigma(n_spins: int, bin_width: float, n_bins: int) -> float:
    # one lattice step of the per-day orientation, at least a bin, at most an eighth of the range
    return max(1.0, min((2.0 / n_spins) / bin_width, n_bins / 8.0))


def _modes(counts: np.ndarray, sigma: float) -> np.ndarray:
    smoothed = gaussian_filter1d(counts.astype(np.float64), sigma, mode="constant", cval=0.0)
    padded = np.concatenate([[0.0], smoothed, [0.0]])
    peak = (padded[1:-1] > padded[:-2]) & (padded[1:-1] > padded[2:])
    return np.flatnonzero(peak & (smoothed > MODE_MASS_FRACTION * smoothed.sum()))


def orientation_histogram(spins: SpinMatrix, spec: WindowSpec, bin_width: float = 0.1) -> OrientationHistogram:
    """Histogram of per-day net orientations pooled over non-overlapping windows.

    Modes are strict local maxima of the Gaussian-smoothed counts (zero outside
    [-1, 1]) carrying more than 5% of the smoothed mass.
    """
    if spec.shift != spec.width:
        raise RejectedInputError(
            f"orientation histograms need non-overlapping windows (shift={spec.shift}, width={spec.width})"
        )
    if not 0.0 < bin_width <= 2.0:
        raise RejectedInputError(f"bin width must lie in (0, 2], got {bin_width}")
    windows = sliding_windows(spins, spec)
    daily = np.concatenate([w.spins.mean(axis=1, dtype=np.float64) for w in windows])
    n_bins = max(1, int(round(2.0 / bin_width)))
    edges = np.linspace(-1.0, 1.0, n_bins + 1)
    counts, _ = np.histogram(daily, bins=edges)
    peaks = _modes(counts, _histogram_sigma(spins.n_spins, bin_width, n_bins))
    centers = 0.5 * (edges[:-1] + edges[1:])
    return OrientationHistogram(
        bin_edges=edges,
        counts=counts.astype(np.int64),
        mode_count=int(peaks.size),
        mode_centers=tuple(float(centers[p]) for p in peaks),
    )


def _inversion_fn(options: InversionOptions, statistic: Callable[[np.ndarray, np.ndarray], float]) -> WindowFn:
    inverter = get_inverter(options.method)

    def fn(window: SpinMatrix) -> float:
        report = inverter.invert(window, options)
        if not report.converged:
            logger.warning("%s did not converge on a window; value kept", options.method)
        return statistic(report.model.J, report.model.h)

    return fn


def aggregate_preference_series(
    spins: SpinMatrix, spec: WindowSpec, options: Optional[InversionOptions] = None, threads: int = 1
) -> TimeSeriesReport:
    """Per window, sum_i h_i of the fitted model (rplm unless options say otherwise)."""
    options = options or InversionOptions()
    values, gaps = map_windows(spins, spec, _inversion_fn(options, lambda J, h: float(h.sum())), threads)
    return make_report(spins, spec, "aggregatePreference", values, gaps, {"inversion": options.model_dump()})


def deviation_from_mean(values: np.ndarray) -> np.ndarray:
    """Subtract the mean over the non-gap entries; gaps stay NaN."""
    valid = ~np.isnan(values)
    if not valid.any():
        return values.copy()
    return values - values[valid].mean()


def trace_deviation_series(
    spins: SpinMatrix, spec: WindowSpec, options: Optional[InversionOptions] = None, threads: int = 1
) -> TimeSeriesReport:
    """Trace of the third-order (Tanaka) J per window, minus its mean across windows."""
    options = (options or InversionOptions()).model_copy(update={"method": "tanaka"})
    traces, gaps = map_windows(spins, spec, _inversion_fn(options, lambda J, h: float(np.trace(J))), threads)
    return make_report(
        spins,
        spec,
        "traceDeviation",
        deviation_from_mean(traces),
        gaps,
        {"inversion": options.model_dump(), "mean_trace": _nanmean(traces)},
    )


def _nanmean(values: np.ndarray) -> Optional[float]:
    valid = values[~np.isnan(values)]
    return float(valid.mean()) if valid.size else None


def smooth_series(report: TimeSeriesReport, half_width: int) -> TimeSeriesReport:
    """Centered moving average over 2 * half_width + 1 points, shrinking at the ends.

    Gaps are skipped in the averages and remain gaps.
    """
    if half_width < 0:
        raise RejectedInputError(f"half width must be >= 0, got {half_width}")
    if half_width == 0:
        return report
    series = pd.Series(report.values)
    smoothed = series.rolling(2 * half_width + 1, center=True, min_periods=1).mean().to_numpy()
    smoothed[list(report.gaps)] = np.nan
    metadata = dict(report.metadata, smooth=half_width)
    return TimeSeriesReport(report.window_starts, smoothed, report.spec, report.kind, report.gaps, metadata)


def normalize_series(report: TimeSeriesReport) -> TimeSeriesReport:
    """Zero mean, unit population standard deviation.

    A constant series becomes all zeros and is flagged with `zero_variance`.
    """
    values = report.values
    valid = ~np.isnan(values)
    if not valid.any():
        raise InsufficientDataError("cannot normalize a series without values")
    centered = values - values[valid].mean()
    sd = float(np.sqrt(np.mean(centered[valid] ** 2)))
    scale = float(np.abs(values[valid]).max())
    metadata: Dict[str, Any] = dict(report.metadata, normalized=True)
    if sd <= 1e-14 * max(scale, 1e-300):
        out = np.where(valid, 0.0, np.nan)
        metadata["zero_variance"] = True
    else:
        out = centered / sd
    return TimeSeriesReport(report.window_starts, out, report.spec, report.kind, report.gaps, metadata)


SERIES_BUILDERS: Dict[str, Callable[..., TimeSeriesReport]] = {
    "netOrientation": lambda spins, spec, options, threads: net_orientation_series(spins, spec),
    "mfEntropy": lambda spins, spec, options, threads: mf_entropy_series(spins, spec),
    "aggregatePreference": aggregate_preference_series,
    "traceDeviation": trace_deviation_series,
}


def build_series(
    kind: str, spins: SpinMatrix, spec: WindowSpec, options: Optional[InversionOptions] = None, threads: int = 1
) -> TimeSeriesReport:
    """Dispatch by series kind; mstLengthDeviation lives in interaction_graph."""
    if kind == "mstLengthDeviation":
        from src.lib.interaction_graph import mst_length_series

        return mst_length_series(spins, spec, options, threads)
    try:
        builder = SERIES_BUILDERS[kind]
    except KeyError:
        raise RejectedInputError(f"unknown series kind {kind!r}") from None
    return builder(spins, spec, options, threads)


__all__: List[str] = [
    "aggregate_preference_series",
    "build_series",
    "map_windows",
    "mean_field_entropy",
    "mf_entropy_series",
    "net_orientation_series",
    "normalize_series",
    "orientation_histogram",
    "smooth_series",
    "trace_deviation_series",
]
