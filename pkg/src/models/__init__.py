from .chain_config import ChainConfig, SampleSummary
from .coupling_model import CouplingModel, FitReport, InformationSummary, KLResult, ModelDistribution
from .empirical_distribution import EmpiricalDistribution
from .graph import PowerLawFit, Tree, WeightedGraph
from .inversion_options import InversionOptions, InversionReport
from .moment_set import MomentSet
from .price_series import PriceSeries
from .run_config import RunConfig
from .series_report import OrientationHistogram, TimeSeriesReport
from .spin_matrix import SpinMatrix
from .window_spec import WindowSpec

__all__ = [
    "ChainConfig",
    "CouplingModel",
    "EmpiricalDistribution",
    "FitReport",
    "InformationSummary",
    "InversionOptions",
    "InversionReport",
    "KLResult",
    "ModelDistribution",
    "MomentSet",
    "OrientationHistogram",
    "PowerLawFit",
    "PriceSeries",
    "RunConfig",
    "SampleSummary",
    "SpinMatrix",
    "TimeSeriesReport",
    "Tree",
    "WeightedGraph",
    "WindowSpec",
]
