from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from src.lib.errors import CapacityError, RejectedInputError

# Dense expansion is bounded by the configuration-table guard.
MAX_TABLE_SPINS = 26


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Observed configuration frequencies.

    Keys encode a configuration as an N-bit pattern: bit b set means s_b = +1.
    Configurations that were never observed are absent (probability 0).
    """

    n_spins: int
    entries: Mapping[int, float]

    def __post_init__(self) -> None:
        if self.n_spins < 1:
            raise RejectedInputError(f"n_spins must be >= 1, got {self.n_spins}")
        entries = {int(k): float(v) for k, v in dict(self.entries).items()}
        if any(v < 0 for v in entries.values()):
            raise RejectedInputError("probabilities must be nonnegative")
        if any(k < 0 or k >= (1 << self.n_spins) for k in entries):
            raise RejectedInputError(f"configuration code outside [0, 2^{self.n_spins})")
        total = math.fsum(entries.values())
        if abs(total - 1.0) > 1e-12:
            raise RejectedInputError(f"probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "entries", MappingProxyType(dict(sorted(entries.items()))))

    def to_dense(self) -> np.ndarray:
        """Probability vector of length 2^N indexed by configuration code."""
        if self.n_spins > MAX_TABLE_SPINS:
            raise CapacityError(f"dense table for N={self.n_spins} exceeds the N <= {MAX_TABLE_SPINS} guard")
        dense = np.zeros(1 << self.n_spins, dtype=np.float64)
        if self.entries:
            dense[np.fromiter(self.entries.keys(), dtype=np.int64)] = np.fromiter(
                self.entries.values(), dtype=np.float64
            )
        return dense
