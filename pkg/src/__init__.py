"""maxent_market: pairwise maximum-entropy models of binarized market data."""

__version__ = "0.1.0"

__all__: list[str] = ["__version__"]
