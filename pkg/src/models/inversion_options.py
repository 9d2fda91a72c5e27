from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, Field

from .coupling_model import CouplingModel

InversionMethod = Literal["nmf", "tap", "tanaka", "rplm"]


class InversionOptions(BaseModel):
    method: InversionMethod = Field("rplm", description="Approximate inversion method")
    ridge: Optional[float] = Field(
        None, ge=0.0, description="Covariance ridge; None selects 1e-8 * trace(C) / N"
    )
    rplm_lambda: float = Field(1e-3, ge=0.0, description="L2 penalty against the summed pseudo-log-likelihood")
    rplm_tolerance: float = Field(1e-6, gt=0.0, description="Gradient-norm stopping threshold")
    rplm_max_iterations: int = Field(15000, ge=1, description="Optimizer iteration cap per spin")

    model_config = {"extra": "forbid", "frozen": True}


@dataclass(frozen=True)
class InversionReport:
    """Outcome of one inversion: the model plus convergence bookkeeping."""

    method: str
    model: CouplingModel
    converged: bool = True
    warnings: Tuple[str, ...] = ()
    gradient_norm: Optional[float] = None
