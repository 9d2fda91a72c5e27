from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.lib.errors import RejectedInputError

_TOL = 1e-12


@dataclass(frozen=True)
class MomentSet:
    """First moments q_i = <s_i> and pairwise moments Q_ij = <s_i s_j>.

    Q is symmetric with an exact unit diagonal. `sample_count` is the number of
    configurations the moments were estimated from (0 for model moments).
    """

    q: np.ndarray
    Q: np.ndarray
    sample_count: int = 0

    def __post_init__(self) -> None:
        q = np.array(self.q, dtype=np.float64)
        Q = np.array(self.Q, dtype=np.float64)
        n = q.shape[0] if q.ndim == 1 else -1
        if q.ndim != 1 or Q.shape != (n, n):
            raise RejectedInputError(f"moment shapes q{q.shape} and Q{Q.shape} are inconsistent")
        if not (np.isfinite(q).all() and np.isfinite(Q).all()):
            raise RejectedInputError("moments must be finite")
        if np.abs(Q - Q.T).max(initial=0.0) > _TOL:
            raise RejectedInputError("pairwise moments must be symmetric")
        if np.abs(np.diag(Q) - 1.0).max(initial=0.0) > _TOL:
            raise RejectedInputError("pairwise moments must have a unit diagonal")
        if np.abs(q).max(initial=0.0) > 1 + _TOL or np.abs(Q).max(initial=0.0) > 1 + _TOL:
            raise RejectedInputError("moments must lie in [-1, 1]")
        if self.sample_count < 0:
            raise RejectedInputError(f"sample_count must be >= 0, got {self.sample_count}")

        Q = 0.5 * (Q + Q.T)
        np.fill_diagonal(Q, 1.0)
        q = np.clip(q, -1.0, 1.0)
        Q = np.clip(Q, -1.0, 1.0)
        q.setflags(write=False)
        Q.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "sample_count", int(self.sample_count))

    @property
    def n_spins(self) -> int:
        return int(self.q.shape[0])

    def covariance(self) -> np.ndarray:
        """C_ij = Q_ij - q_i q_j."""
        return self.Q - np.outer(self.q, self.q)

    def correlation(self) -> np.ndarray:
        """Pearson correlation coefficients of the spins (0 where a variance vanishes)."""
        cov = self.covariance()
        sd = np.sqrt(np.clip(np.diag(cov), 0.0, None))
        denom = np.outer(sd, sd)
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = np.where(denom > 0, cov / np.where(denom > 0, denom, 1.0), 0.0)
        np.fill_diagonal(corr, 1.0)
        return corr

    def is_degenerate(self) -> bool:
        """True when some |q_i| = 1 or some off-diagonal |Q_ij| = 1."""
        off = self.Q[~np.eye(self.n_spins, dtype=bool)]
        return bool(np.any(np.abs(self.q) >= 1.0) or np.any(np.abs(off) >= 1.0))
