import math

import numpy as np
import pytest
from scipy.stats import linregress

from src.lib import exact_engine, sampler
from src.lib.errors import CapacityError, DimensionMismatchError, InsufficientDataError
from src.models.chain_config import ChainConfig
from src.models.coupling_model import CouplingModel


def _two_spins(coupling):
    return CouplingModel(("a", "b"), np.array([[0.0, coupling], [coupling, 0.0]]), np.zeros(2))


def test_glauber_step_changes_at_most_one_site():
    model = sampler.make_synthetic_model(6, 0.3, 0.1, seed=1)
    rng = sampler.make_rng(3)
    state = np.ones(6, dtype=np.int8)
    for _ in range(50):
        new = sampler.glauber_step(model, state, rng)
        assert np.count_nonzero(new != state) <= 1
        state = new
    with pytest.raises(DimensionMismatchError):
        sampler.glauber_step(model, np.ones(5), rng)


def test_glauber_step_follows_a_strong_field():
    model = CouplingModel(("a",), np.zeros((1, 1)), np.array([20.0]))
    rng = sampler.make_rng(0)
    assert all(sampler.glauber_step(model, np.array([-1]), rng)[0] == 1 for _ in range(100))


def test_sample_moments_is_deterministic_given_a_seed():
    model = sampler.make_synthetic_model(4, 0.3, 0.1, seed=2)
    chain = ChainConfig(seed=17, equilibration_sweeps=100, measure_sweeps=2_000)
    a = sampler.sample_moments(model, chain)
    b = sampler.sample_moments(model, chain)
    assert np.array_equal(a.moments.Q, b.moments.Q)
    assert a.attempts == b.attempts == (100 + 2_000) * 4
    assert a.retained_samples == 2_000 // 4
    assert 0.0 < a.acceptance_rate <= 1.0


def test_two_spin_correlation_matches_closed_form():
    chain = ChainConfig(seed=5, equilibration_sweeps=1_000, measure_sweeps=100_000, thinning=2)
    summary = sampler.sample_moments(_two_spins(0.5), chain)
    assert abs(summary.moments.Q[0, 1] - math.tanh(0.5)) <= 3 * summary.Q_stderr[0, 1]
    assert np.all(np.abs(summary.moments.q) <= 3 * summary.q_stderr)


def test_sampled_moments_match_enumeration(small_model):
    exact = exact_engine.model_moments(exact_engine.enumerate_model(small_model))
    chain = ChainConfig(seed=9, equilibration_sweeps=1_000, measure_sweeps=100_000)
    summary = sampler.sample_moments(small_model, chain)
    upper = np.triu(np.ones((5, 5), dtype=bool), k=1)
    z = np.concatenate(
        [
            np.abs(summary.moments.q - exact.q) / summary.q_stderr,
            np.abs(summary.moments.Q - exact.Q)[upper] / summary.Q_stderr[upper],
        ]
    )
    # 3 s.e. per moment; a single excursion among 15 is allowed at 4
    assert np.count_nonzero(z > 3) <= 1
    assert np.all(z <= 4)


def test_parallel_chains_do_not_depend_on_thread_count(small_model):
    chain = ChainConfig(seed=21, equilibration_sweeps=50, measure_sweeps=500, thinning=1)
    serial = sampler.sample_moments_parallel(small_model, chain, chains=3, threads=1)
    threaded = sampler.sample_moments_parallel(small_model, chain, chains=3, threads=3)
    assert np.array_equal(serial.moments.Q, threaded.moments.Q)
    assert serial.retained_samples == 3 * 500


def test_schedule_without_retained_samples_is_rejected(small_model):
    with pytest.raises(InsufficientDataError):
        sampler.sample_moments(small_model, ChainConfig(measure_sweeps=3, equilibration_sweeps=0))


def test_sample_configurations(small_model):
    chain = ChainConfig(seed=4, equilibration_sweeps=10)
    spins = sampler.sample_configurations(small_model, chain, 50)
    assert spins.spins.shape == (50, 5)
    assert spins.labels == small_model.labels
    assert spins.dates is None
    assert np.array_equal(spins.spins, sampler.sample_configurations(small_model, chain, 50).spins)


def test_strong_fields_give_all_bullish_rows():
    model = CouplingModel(("a", "b", "c"), np.zeros((3, 3)), np.full(3, 10.0))
    spins = sampler.sample_configurations(model, ChainConfig(seed=1, equilibration_sweeps=20), 100)
    assert np.all(spins.spins == 1)


def test_make_synthetic_model():
    model = sampler.make_synthetic_model(6, 0.3, 0.1, seed=8)
    assert np.array_equal(model.J, model.J.T)
    assert np.all(np.diag(model.J) == 0)
    off = model.J[~np.eye(6, dtype=bool)]
    assert np.all((off >= 0) & (off <= 0.3))
    assert np.all(np.abs(model.h) <= 0.1)
    assert np.array_equal(model.J, sampler.make_synthetic_model(6, 0.3, 0.1, seed=8).J)
    assert np.array_equal(sampler.make_synthetic_model(3, 0.0, 0.1, seed=8).J, np.zeros((3, 3)))


def test_transition_matrix_is_stochastic_and_reversible(small_model):
    p = exact_engine.enumerate_model(small_model).probabilities
    for site in range(small_model.n_spins):
        P = sampler.transition_matrix(small_model, site)
        assert np.allclose(P.sum(axis=1), 1.0, atol=1e-14)
        flow = p[:, None] * P
        assert np.allclose(flow, flow.T, atol=1e-12)


def test_sweep_keeps_the_gibbs_distribution(small_model):
    p = exact_engine.enumerate_model(small_model).probabilities
    assert np.abs(p @ sampler.sweep_operator(small_model) - p).sum() <= 1e-10


def test_operator_guard():
    model = CouplingModel(tuple(str(i) for i in range(13)), np.zeros((13, 13)), np.zeros(13))
    with pytest.raises(CapacityError):
        sampler.transition_matrix(model, 0)


def test_detailed_balance_on_random_instances():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(2, 11))
        upper = np.triu(rng.normal(0.0, 0.5, size=(n, n)), k=1)
        model = CouplingModel(tuple(f"s{i}" for i in range(n)), upper + upper.T, rng.normal(0.0, 0.3, size=n))
        p = exact_engine.enumerate_model(model).probabilities
        site = int(rng.integers(0, n))
        code = int(rng.integers(0, 1 << n))
        flipped = code ^ (1 << site)
        P = sampler.transition_matrix(model, site)
        assert np.isclose(p[code] * P[code, flipped], p[flipped] * P[flipped, code], rtol=1e-10, atol=1e-12)


def test_standard_error_shrinks_as_inverse_square_root():
    retained = [1_000, 10_000, 100_000]
    errors = []
    for count in retained:
        # default thinning is N = 2 sweeps
        chain = ChainConfig(seed=11, equilibration_sweeps=500, measure_sweeps=2 * count)
        summary = sampler.sample_moments(_two_spins(0.5), chain)
        assert summary.retained_samples == count
        errors.append(summary.Q_stderr[0, 1])
    fit = linregress(np.log(retained), np.log(errors))
    assert fit.slope == pytest.approx(-0.5, abs=0.1)
