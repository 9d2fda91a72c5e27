from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.lib.errors import RejectedInputError


@dataclass(frozen=True)
class SpinMatrix:
    """T x N matrix of daily orientations (+1 bullish, -1 bearish).

    The array is stored read-only; slicing rows (see `rows`) returns views that
    share the same storage.
    """

    labels: Tuple[str, ...]
    spins: np.ndarray
    dates: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        raw = np.asarray(self.spins)
        if raw.ndim != 2:
            raise RejectedInputError(f"spins must be a 2-D matrix, got ndim={raw.ndim}")
        if raw.shape[0] < 1 or raw.shape[1] < 1:
            raise RejectedInputError(f"spins must have T >= 1 and N >= 1, got shape {raw.shape}")
        valid = (raw == 1) | (raw == -1)
        if not valid.all():
            row, col = (int(x) for x in np.argwhere(~valid)[0])
            raise RejectedInputError(f"spin entries must be -1 or +1, got {raw[row, col]!r}", row, col)

        arr = raw if raw.dtype == np.int8 else raw.astype(np.int8)
        if arr.flags.writeable:
            arr = arr.copy() if arr is raw else arr
            arr.setflags(write=False)
        object.__setattr__(self, "spins", arr)
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if len(self.labels) != arr.shape[1]:
            raise RejectedInputError(f"{len(self.labels)} labels for {arr.shape[1]} spin columns")
        if self.dates is not None:
            object.__setattr__(self, "dates", tuple(str(x) for x in self.dates))
            if len(self.dates) != arr.shape[0]:
                raise RejectedInputError(f"{len(self.dates)} dates for {arr.shape[0]} spin rows")

    @property
    def n_samples(self) -> int:
        return int(self.spins.shape[0])

    @property
    def n_spins(self) -> int:
        return int(self.spins.shape[1])

    def rows(self, start: int, stop: int) -> "SpinMatrix":
        """Return the rows [start, stop) as a view sharing storage."""
        dates = self.dates[start:stop] if self.dates is not None else None
        return SpinMatrix(self.labels, self.spins[start:stop], dates)