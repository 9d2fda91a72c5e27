"""Exact moment matching exposed through the inverter interface (N <= 25)."""

from __future__ import annotations

from typing import Callable, Optional, Tuple

from src.lib import exact_engine
from src.lib.base_inverter import MomentInverter
from src.models.inversion_options import InversionOptions, InversionReport
from src.models.moment_set import MomentSet


class ExactInverter(MomentInverter):
    def __init__(
        self,
        name: str = "exact",
        tolerance: float = exact_engine.DEFAULT_TOLERANCE,
        max_iterations: int = exact_engine.DEFAULT_MAX_ITERATIONS,
    ) -> None:
        super().__init__(name=name)
        self.tolerance = tolerance
        self.max_iterations = max_iterations

    def invert_moments(
        self,
        moments: MomentSet,
        options: InversionOptions,
        labels: Optional[Tuple[str, ...]] = None,
    ) -> InversionReport:
        report = exact_engine.fit_exact(
            moments, tolerance=self.tolerance, max_iterations=self.max_iterations, labels=labels
        )
        warnings: Tuple[str, ...] = ()
        if not report.converged:
            warnings = (
                f"exact: stopped after {report.iterations} iterations "
                f"with moment mismatch {report.max_moment_error:.3g}",
            )
        return InversionReport(self.name, report.model, converged=report.converged, warnings=warnings)


def register(registry: Callable[..., None]) -> None:
    registry("exact", ExactInverter())
