from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .moment_set import MomentSet


class ChainConfig(BaseModel):
    """Glauber chain schedule. One sweep is N single-site updates."""

    seed: int = Field(0, ge=0, lt=2**64)
    equilibration_sweeps: int = Field(10_000, ge=0)
    measure_sweeps: int = Field(200_000, ge=0)
    thinning: Optional[int] = Field(None, ge=1, description="Sweeps between retained samples; None means N")
    chains: int = Field(1, ge=1, description="Independent chains pooled by sample; threads only run them")

    model_config = {"extra": "forbid", "frozen": True}

    @model_validator(mode="after")
    def _retains_samples(self) -> ChainConfig:
        # with implicit thinning (N sweeps) the check waits for the model, see sampler._summarize
        if self.thinning is not None and self.measure_sweeps < self.thinning:
            raise ValueError(
                f"measure_sweeps={self.measure_sweeps} retains no samples at thinning={self.thinning}"
            )
        return self

    def resolved_thinning(self, n_spins: int) -> int:
        return self.thinning if self.thinning is not None else max(1, n_spins)


@dataclass(frozen=True)
class SampleSummary:
    moments: MomentSet
    retained_samples: int
    acceptance_rate: float
    q_stderr: np.ndarray
    Q_stderr: np.ndarray
    attempts: int
    generator: str
