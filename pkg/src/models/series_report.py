from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Literal, Tuple, Union

import numpy as np

from .window_spec import WindowSpec

SeriesKind = Literal["netOrientation", "mfEntropy", "aggregatePreference", "traceDeviation", "mstLengthDeviation"]
SERIES_KINDS: Tuple[str, ...] = (
    "netOrientation",
    "mfEntropy",
    "aggregatePreference",
    "traceDeviation",
    "mstLengthDeviation",
)


@dataclass(frozen=True)
class TimeSeriesReport:
    """One value per window; failed windows are NaN and listed in `gaps`."""

    window_starts: Tuple[Union[str, int], ...]
    values: np.ndarray
    spec: WindowSpec
    kind: SeriesKind
    gaps: Tuple[int, ...] = ()
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.shape[0] != len(self.window_starts):
            raise ValueError(f"{values.shape} values for {len(self.window_starts)} windows")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "window_starts", tuple(self.window_starts))
        object.__setattr__(self, "gaps", tuple(int(g) for g in self.gaps))


@dataclass(frozen=True)
class OrientationHistogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    mode_count: int
    mode_centers: Tuple[float, ...] = ()
