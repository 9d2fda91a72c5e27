from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.lib.errors import RejectedInputError

Edge = Tuple[int, int, float]


@dataclass(frozen=True)
class WeightedGraph:
    """Complete graph on N assets given by a symmetric distance matrix."""

    labels: Tuple[str, ...]
    dist: np.ndarray

    def __post_init__(self) -> None:
        dist = np.array(self.dist, dtype=np.float64)
        n = len(self.labels)
        if dist.shape != (n, n):
            raise RejectedInputError(f"distance matrix {dist.shape} for {n} labels")
        if not np.isfinite(dist).all() or np.any(dist < 0):
            raise RejectedInputError("distances must be finite and nonnegative")
        if np.abs(dist - dist.T).max(initial=0.0) > 1e-12 or np.any(np.diag(dist) != 0):
            raise RejectedInputError("distance matrix must be symmetric with a zero diagonal")
        dist.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))

    @property
    def n_vertices(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class Tree:
    n_vertices: int
    edges: Tuple[Edge, ...]
    length: float

    def __post_init__(self) -> None:
        if len(self.edges) != self.n_vertices - 1:
            raise RejectedInputError(f"a tree on {self.n_vertices} vertices needs {self.n_vertices - 1} edges")
        if any(not 0 <= i < j < self.n_vertices for i, j, _ in self.edges):
            raise RejectedInputError("tree edges must satisfy 0 <= i < j < N")


@dataclass(frozen=True)
class PowerLawFit:
    """f(n) ~ c n^-alpha fitted on log-log axes."""

    alpha: float
    alpha_stderr: float
    r2: float
    points_used: int
    intercept: float
