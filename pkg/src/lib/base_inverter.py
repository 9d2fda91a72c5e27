from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Optional, Tuple

from src.lib.spin_data import smoothed_moments
from src.models.inversion_options import InversionOptions, InversionReport
from src.models.moment_set import MomentSet
from src.models.spin_matrix import SpinMatrix


class BaseInverter(ABC):
    """Abstract base class for inverse-Ising methods.

    Concrete inverters implement invert(); the registry accepts instances.
    """

    name: str

    def __init__(self, name: str) -> None:
        self.name = name

    @abstractmethod
    def invert(self, spins: SpinMatrix, options: InversionOptions) -> InversionReport:
        """Fit a CouplingModel to the spin data."""

    def validate(self, spins: SpinMatrix) -> bool:
        """Return True when the data satisfies this inverter's preconditions."""
        return spins.n_samples >= 1


class MomentInverter(BaseInverter):
    """Inverter that only needs first and second moments.

    Saturated moments are pseudocount-smoothed before inversion.
    """

    def invert(self, spins: SpinMatrix, options: InversionOptions) -> InversionReport:
        return self.invert_moments(smoothed_moments(spins), options, labels=spins.labels)

    @abstractmethod
    def invert_moments(
        self,
        moments: MomentSet,
        options: InversionOptions,
        labels: Optional[Tuple[str, ...]] = None,
    ) -> InversionReport:
        """Fit a CouplingModel to a MomentSet."""
