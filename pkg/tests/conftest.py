"""Shared fixtures: small pairwise models, data sampled from them, price files."""

from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.lib import sampler
from src.lib.inverter_registry import clear_registry
from src.models.chain_config import ChainConfig
from src.models.coupling_model import CouplingModel
from src.models.price_series import PriceSeries
from src.models.spin_matrix import SpinMatrix
from src.services import data_io


@pytest.fixture
def small_model() -> CouplingModel:
    return sampler.make_synthetic_model(5, 0.3, 0.1, seed=7)


@pytest.fixture
def sampled_spins(small_model: CouplingModel) -> SpinMatrix:
    chain = ChainConfig(seed=42, equilibration_sweeps=500)
    return sampler.sample_configurations(small_model, chain, 4000)


@pytest.fixture
def fresh_registry():
    # tests that touch the registry start empty and leave it empty;
    # get_inverter re-registers the built-ins lazily afterwards
    clear_registry()
    yield
    clear_registry()


def make_prices(n_assets: int = 4, n_days: int = 300, seed: int = 0) -> PriceSeries:
    rng = np.random.default_rng(seed)
    dates = tuple(d.strftime("%Y-%m-%d") for d in pd.bdate_range("2021-01-04", periods=n_days))
    open_ = 100.0 * np.exp(np.cumsum(rng.normal(0.0, 0.01, size=(n_days, n_assets)), axis=0))
    close = open_ * np.exp(rng.normal(0.0, 0.01, size=(n_days, n_assets)))
    return PriceSeries(tuple(f"A{i}" for i in range(n_assets)), dates, open_, close)


@pytest.fixture
def price_csv(tmp_path: Path) -> Path:
    path = tmp_path / "prices.csv"
    data_io.write_prices(make_prices(), path)
    return path
