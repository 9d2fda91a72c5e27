"""Sliding-window indicators on synthetic data that alternates ordered and disordered regimes."""

import itertools
import math

import numpy as np
import pytest
from networkx.utils import UnionFind

from src.lib import interaction_graph, market_analytics, sampler
from src.lib.inverter_registry import get_inverter
from src.lib.spin_data import concatenate
from src.models.chain_config import ChainConfig
from src.models.coupling_model import CouplingModel
from src.models.graph import WeightedGraph
from src.models.inversion_options import InversionOptions
from src.models.window_spec import WindowSpec

N = 6
SEGMENT = 300
WIDTH = 100
SHIFT = 20


@pytest.fixture(scope="module")
def regime_spins():
    labels = tuple(f"s{i}" for i in range(N))
    ordered = CouplingModel(labels, np.full((N, N), 0.6) - np.diag(np.full(N, 0.6)), np.full(N, 0.1))
    disordered = CouplingModel(labels, np.zeros((N, N)), np.zeros(N))
    segments = [
        sampler.sample_configurations(model, ChainConfig(seed=seed, equilibration_sweeps=200), SEGMENT)
        for seed, model in enumerate([ordered, disordered, ordered, disordered])
    ]
    spins = segments[0]
    for segment in segments[1:]:
        spins = concatenate(spins, segment)
    return spins


def _by_regime(values):
    ordered, disordered = [], []
    for k, value in enumerate(values):
        start = k * SHIFT
        first, last = start // SEGMENT, (start + WIDTH - 1) // SEGMENT
        if first != last or math.isnan(value):
            continue
        (ordered if first % 2 == 0 else disordered).append(value)
    return np.mean(ordered), np.mean(disordered)


def test_entropy_falls_as_orientation_grows(regime_spins):
    spec = WindowSpec(width=WIDTH, shift=SHIFT)
    q = market_analytics.net_orientation_series(regime_spins, spec).values
    s = market_analytics.mf_entropy_series(regime_spins, spec).values
    assert np.corrcoef(np.abs(q), s)[0, 1] <= -0.5


def test_trace_deviation_is_lower_in_ordered_regimes(regime_spins):
    report = market_analytics.trace_deviation_series(regime_spins, WindowSpec(width=WIDTH, shift=SHIFT))
    ordered, disordered = _by_regime(report.values)
    assert ordered < disordered


def test_mst_length_is_lower_in_ordered_regimes(regime_spins):
    report = interaction_graph.mst_length_series(
        regime_spins, WindowSpec(width=WIDTH, shift=SHIFT), InversionOptions(method="rplm")
    )
    ordered, disordered = _by_regime(report.values)
    assert ordered < disordered


def _brute_force_mst_length(dist):
    n = dist.shape[0]
    pairs = list(itertools.combinations(range(n), 2))
    best = math.inf
    for chosen in itertools.combinations(pairs, n - 1):
        forest = UnionFind(range(n))
        acyclic = True
        for i, j in chosen:
            if forest[i] == forest[j]:
                acyclic = False
                break
            forest.union(i, j)
        if acyclic:
            best = min(best, math.fsum(dist[i, j] for i, j in chosen))
    return best


def test_mst_matches_exhaustive_search():
    rng = np.random.default_rng(0)
    labels = tuple("abcdef")
    for _ in range(25):
        upper = np.triu(rng.uniform(0.0, 2.0, size=(6, 6)), k=1)
        graph = WeightedGraph(labels, upper + upper.T)
        tree = interaction_graph.minimum_spanning_tree(graph)
        assert tree.length == pytest.approx(_brute_force_mst_length(graph.dist), abs=1e-12)
        freqs = interaction_graph.degree_distribution(tree)
        assert sum(k * v for k, v in freqs.items()) == 2 * (tree.n_vertices - 1)


def test_power_law_recovers_planted_exponent():
    alpha, c = 1.64, 500.0
    freqs = {n: c * n**-alpha for n in range(1, 12)}
    fit = interaction_graph.fit_power_law(freqs)
    assert fit.alpha == pytest.approx(alpha, abs=1e-9)
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(c), abs=1e-9)


def test_degree_statistics_of_fitted_trees(sampled_spins):
    fitted = get_inverter("nmf").invert(sampled_spins, InversionOptions(method="nmf")).model
    tree = interaction_graph.minimum_spanning_tree(interaction_graph.coupling_to_distance(fitted))
    freqs = interaction_graph.degree_distribution(tree)
    assert sum(freqs.values()) == fitted.n_spins
    text = interaction_graph.export_tree(tree, fitted.labels)
    back, labels = interaction_graph.read_tree(text)
    assert back == tree and labels == fitted.labels
