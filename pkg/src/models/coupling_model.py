from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.lib.errors import RejectedInputError


@dataclass(frozen=True)
class CouplingModel:
    """Pairwise Gibbs model p(s) ~ exp(sum_{i<j} J_ij s_i s_j + sum_i h_i s_i).

    The diagonal of J is zero unless `diagonal_meaningful` is set, in which case
    it stores the self-coupling diagnostics of a third-order inversion. The
    diagonal never enters the energy.
    """

    labels: Tuple[str, ...]
    J: np.ndarray
    h: np.ndarray
    diagonal_meaningful: bool = False
    warnings: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        J = np.array(self.J, dtype=np.float64)
        h = np.array(self.h, dtype=np.float64)
        n = h.shape[0] if h.ndim == 1 else -1
        if h.ndim != 1 or J.shape != (n, n):
            raise RejectedInputError(f"coupling shapes J{J.shape} and h{h.shape} are inconsistent")
        if len(self.labels) != n:
            raise RejectedInputError(f"{len(self.labels)} labels for {n} spins")
        if not (np.isfinite(J).all() and np.isfinite(h).all()):
            raise RejectedInputError("couplings and fields must be finite")
        if np.abs(J - J.T).max(initial=0.0) > 1e-12:
            raise RejectedInputError("coupling matrix must be symmetric")
        if not self.diagonal_meaningful and np.any(np.diag(J) != 0.0):
            raise RejectedInputError("coupling diagonal must be zero unless diagonal_meaningful is set")
        J = 0.5 * (J + J.T)
        J.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @property
    def n_spins(self) -> int:
        return int(self.h.shape[0])

    def off_diagonal(self) -> np.ndarray:
        """J with its diagonal zeroed (the part that enters the energy)."""
        J = np.array(self.J)
        np.fill_diagonal(J, 0.0)
        return J


@dataclass(frozen=True)
class ModelDistribution:
    """Exact distribution of a CouplingModel over all 2^N configurations.

    `probabilities[c]` belongs to the configuration whose bit b is set when
    s_b = +1.
    """

    model: CouplingModel
    log_z: float
    probabilities: np.ndarray

    @property
    def n_spins(self) -> int:
        return self.model.n_spins


@dataclass(frozen=True)
class FitReport:
    model: CouplingModel
    iterations: int
    max_moment_error: float
    converged: bool
    tolerance: float

    def __post_init__(self) -> None:
        if self.converged and not self.max_moment_error <= self.tolerance:
            raise RejectedInputError(
                f"converged report with mismatch {self.max_moment_error!r} above tolerance {self.tolerance!r}"
            )


@dataclass(frozen=True)
class KLResult:
    """Kullback-Leibler divergence in nats.

    `out_of_support` is set (and `value` is +inf) when the first argument puts
    mass on a configuration the second one excludes.
    """

    value: float
    out_of_support: bool = False


@dataclass(frozen=True)
class InformationSummary:
    """Multi-information I_N, pairwise information I_2 and their ratio (nats)."""

    multi_information: float
    pairwise_information: float
    ratio: Optional[float]
    entropy_independent: float
    entropy_pairwise: float
    entropy_data: float
