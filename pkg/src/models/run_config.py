from pathlib import Path
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, Field

from .chain_config import ChainConfig
from .inversion_options import InversionOptions
from .window_spec import WindowSpec

Command = Literal["ingest", "fit", "sample", "diagnose", "window", "mst", "degrees", "synth"]
FitMethod = Literal["exact", "nmf", "tap", "tanaka", "rplm"]
WindowKind = Literal[
    "netOrientation",
    "mfEntropy",
    "aggregatePreference",
    "traceDeviation",
    "mstLengthDeviation",
    "orientationHistogram",
]


class RunConfig(BaseModel):
    command: Command = Field(..., description="Pipeline to run")
    input: Optional[Path] = Field(None, description="Input file (prices, spins, model, tree or frequencies)")
    output: Optional[Path] = Field(None, description="Primary output file")
    model: Optional[Path] = Field(None, description="Model JSON used by diagnose")
    method: Optional[FitMethod] = Field(None, description="Fitting method; None picks the command default")
    inversion: InversionOptions = Field(default_factory=InversionOptions)
    window: Optional[WindowSpec] = None
    chain: ChainConfig = Field(default_factory=ChainConfig)
    kind: Optional[WindowKind] = None
    smooth: int = Field(0, ge=0, description="Half width of the centered moving average")
    normalize: bool = False
    seed: Optional[int] = Field(None, ge=0, lt=2**64)
    threads: Optional[int] = Field(None, ge=1)
    count: Optional[int] = Field(None, ge=1, description="Number of configurations to sample")
    n_spins: Optional[int] = Field(None, ge=1)
    coupling_scale: float = Field(0.3, ge=0.0)
    field_scale: float = Field(0.1, ge=0.0)
    tolerance: float = Field(1e-6, gt=0.0)
    max_iterations: int = Field(50_000, ge=1)
    bin_width: float = Field(0.1, gt=0.0, le=2.0)
    metadata: Optional[Dict[str, Any]] = Field(default_factory=lambda: {})

    model_config = {"extra": "forbid"}

    def as_dict(self) -> Dict[str, Any]:
        """Return a JSON-friendly dict representation of the config."""
        return self.model_dump(mode="json")
