from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.lib.errors import RejectedInputError


def _frozen(values: object, dtype: type) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PriceSeries:
    """Daily open/close prices for N assets over T trading days.

    `open` and `close` are T x N matrices; rows align with `dates`.
    """

    labels: Tuple[str, ...]
    dates: Tuple[str, ...]
    open: np.ndarray
    close: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        object.__setattr__(self, "dates", tuple(str(x) for x in self.dates))
        object.__setattr__(self, "open", _frozen(self.open, np.float64))
        object.__setattr__(self, "close", _frozen(self.close, np.float64))

        if self.open.ndim != 2 or self.open.shape != self.close.shape:
            raise RejectedInputError(f"open {self.open.shape} and close {self.close.shape} must be equal 2-D shapes")
        n_rows, n_cols = self.open.shape
        if len(self.labels) != n_cols:
            raise RejectedInputError(f"{len(self.labels)} labels for {n_cols} price columns")
        if len(set(self.labels)) != len(self.labels):
            raise RejectedInputError("asset labels must be unique")
        if len(self.dates) != n_rows:
            raise RejectedInputError(f"{len(self.dates)} dates for {n_rows} price rows")
        for t in range(1, n_rows):
            if not self.dates[t] > self.dates[t - 1]:
                raise RejectedInputError(f"dates not strictly increasing at {self.dates[t]}", row=t)
        for name, arr in (("open", self.open), ("close", self.close)):
            bad = ~np.isfinite(arr) | (arr <= 0)
            if bad.any():
                row, col = (int(x) for x in np.argwhere(bad)[0])
                raise RejectedInputError(f"{name} price must be finite and > 0, got {arr[row, col]!r}", row, col)

    @property
    def n_days(self) -> int:
        return int(self.open.shape[0])

    @property
    def n_assets(self) -> int:
        return int(self.open.shape[1])
