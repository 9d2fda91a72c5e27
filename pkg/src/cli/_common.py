from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

from src.models.inversion_options import InversionOptions
from src.models.run_config import RunConfig
from src.services.run_metadata import run_metadata

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3
EXIT_REGISTER = 4


@dataclass(frozen=True)
class RunContext:
    """A validated config plus the values resolved at startup."""

    config: RunConfig
    seed: Optional[int]
    threads: int

    @property
    def output(self) -> Path:
        assert self.config.output is not None
        return self.config.output

    def metadata(self, **extra: Any) -> Dict[str, Any]:
        return run_metadata(self.config, seed=self.seed, **extra)

    def sidecar(self, tag: str, suffix: str = ".json") -> Path:
        """Path next to the primary output: `<stem>.<tag><suffix>`."""
        return self.output.with_name(f"{self.output.stem}.{tag}{suffix}")

    def method(self, default_method: str) -> str:
        """`--method`, else an explicit `[inversion] method` from the config file, else the command default."""
        if self.config.method is not None:
            return self.config.method
        # fields_set tells a file value apart from the model default
        if "method" in self.config.inversion.model_fields_set:
            return self.config.inversion.method
        return default_method

    def inversion(self, default_method: str = "rplm") -> InversionOptions:
        method = self.method(default_method)
        if method == self.config.inversion.method:
            return self.config.inversion
        return InversionOptions.model_validate(dict(self.config.inversion.model_dump(), method=method))
