"""Heat-bath Glauber dynamics for pairwise models.

A sweep is N single-site updates. Random numbers come from numpy's Philox
generator: site indices and uniforms are drawn in fixed-size chunks and
consumed by a compiled kernel, so a chain is a pure function of its seed and
schedule.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Tuple, Union

import numpy as np
from numba import jit
from scipy.special import expit

from src.lib.errors import CapacityError, DimensionMismatchError, InsufficientDataError
from src.models.chain_config import ChainConfig, SampleSummary
from src.models.coupling_model import CouplingModel
from src.models.moment_set import MomentSet
from src.models.spin_matrix import SpinMatrix

logger = logging.getLogger(__name__)

CHUNK_UPDATES = 1 << 20
MAX_OPERATOR_SPINS = 12

Seed = Union[int, np.random.SeedSequence]


def generator_name() -> str:
    return f"numpy.random.Philox (numpy {np.__version__})"


def make_rng(seed: Seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def chain_seeds(seed: int, chains: int) -> List[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(chains)


@jit(nopython=True, nogil=True)
def _heat_bath(state, J, h, sites, uniforms, stride, out):  # type: ignore[no-untyped-def]
    # writes the state into `out` after every `stride` updates when stride > 0
    n = state.shape[0]
    changes = 0
    recorded = 0
    for k in range(sites.shape[0]):
        i = sites[k]
        field = h[i]
        for j in range(n):
            if j != i:
                field += J[i, j] * state[j]
        if field >= 0.0:
            p_up = 1.0 / (1.0 + math.exp(-2.0 * field))
        else:
            e = math.exp(2.0 * field)
            p_up = e / (1.0 + e)
        new = 1 if uniforms[k] < p_up else -1
        if new != state[i]:
            state[i] = new
            changes += 1
        if stride > 0 and (k + 1) % stride == 0:
            out[recorded, :] = state
            recorded += 1
    return changes


class _Chain:
    """One Markov chain: model arrays, current state and RNG."""

    def __init__(self, model: CouplingModel, seed: Seed) -> None:
        self.n = model.n_spins
        self.J = np.ascontiguousarray(model.off_diagonal())
        self.h = np.ascontiguousarray(model.h, dtype=np.float64)
        self.rng = make_rng(seed)
        self.state = (2 * self.rng.integers(0, 2, size=self.n) - 1).astype(np.int8)
        self.attempts = 0
        self.changes = 0
        self._empty = np.empty((0, self.n), dtype=np.int8)

    def _draw(self, m: int) -> Tuple[np.ndarray, np.ndarray]:
        return self.rng.integers(0, self.n, size=m), self.rng.random(m)

    def advance(self, updates: int) -> None:
        while updates > 0:
            m = min(updates, CHUNK_UPDATES)
            sites, uniforms = self._draw(m)
            self.changes += _heat_bath(self.state, self.J, self.h, sites, uniforms, 0, self._empty)
            self.attempts += m
            updates -= m

    def record(self, count: int, stride: int) -> np.ndarray:
        """Return `count` states, each taken `stride` updates after the previous one."""
        out = np.empty((count, self.n), dtype=np.int8)
        per_chunk = max(1, CHUNK_UPDATES // stride)
        done = 0
        while done < count:
            k = min(per_chunk, count - done)
            sites, uniforms = self._draw(k * stride)
            self.changes += _heat_bath(self.state, self.J, self.h, sites, uniforms, stride, out[done : done + k])
            self.attempts += k * stride
            done += k
        return out


def glauber_step(model: CouplingModel, state: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One heat-bath update at a uniformly random site; returns a new array."""
    s = np.array(state, dtype=np.int8)
    if s.shape != (model.n_spins,):
        raise DimensionMismatchError(f"state of shape {s.shape} for a model with N={model.n_spins}")
    i = int(rng.integers(0, model.n_spins))
    field = model.h[i] + model.off_diagonal()[i] @ s
    s[i] = 1 if rng.random() < expit(2.0 * field) else -1
    return s


def _retained(config: ChainConfig, n: int) -> Tuple[int, int]:
    thinning = config.resolved_thinning(n)
    return config.measure_sweeps // thinning, thinning * n


def _run_chain(model: CouplingModel, config: ChainConfig, seed: Seed) -> Tuple[np.ndarray, np.ndarray, int, int, int]:
    # returns (sum of s, sum of s s^T, retained, attempts, changes)
    n = model.n_spins
    count, stride = _retained(config, n)
    chain = _Chain(model, seed)
    chain.advance(config.equilibration_sweeps * n)
    s_sum = np.zeros(n)
    ss_sum = np.zeros((n, n))
    block = max(1, CHUNK_UPDATES // stride)
    done = 0
    while done < count:
        k = min(block, count - done)
        samples = chain.record(k, stride).astype(np.float64)
        s_sum += samples.sum(axis=0)
        ss_sum += samples.T @ samples
        done += k
    return s_sum, ss_sum, count, chain.attempts, chain.changes


def _summarize(
    s_sum: np.ndarray, ss_sum: np.ndarray, retained: int, attempts: int, changes: int
) -> SampleSummary:
    if retained < 1:
        raise InsufficientDataError("the chain schedule retains no samples; raise measure_sweeps")
    q = s_sum / retained
    Q = ss_sum / retained
    np.fill_diagonal(Q, 1.0)
    Q = 0.5 * (Q + Q.T)
    # entries are +-1, so the sample variance of s_i is (1 - q_i^2) R / (R - 1)
    denom = retained - 1 if retained > 1 else float("nan")
    q_stderr = np.sqrt(np.clip(1.0 - q**2, 0.0, None) / denom)
    Q_stderr = np.sqrt(np.clip(1.0 - Q**2, 0.0, None) / denom)
    np.fill_diagonal(Q_stderr, 0.0)
    return SampleSummary(
        moments=MomentSet(np.clip(q, -1.0, 1.0), np.clip(Q, -1.0, 1.0), sample_count=retained),
        retained_samples=retained,
        acceptance_rate=changes / attempts if attempts else 0.0,
        q_stderr=q_stderr,
        Q_stderr=Q_stderr,
        attempts=attempts,
        generator=generator_name(),
    )


def sample_moments(model: CouplingModel, config: ChainConfig) -> SampleSummary:
    """Equilibrate, then average q and Q over floor(measure_sweeps / thinning) retained states.

    Standard errors treat retained states as independent; thinning controls
    how well that holds.
    """
    summary = _summarize(*_run_chain(model, config, config.seed))
    logger.info(
        "sampled %d states (acceptance %.3f, %d attempts)",
        summary.retained_samples,
        summary.acceptance_rate,
        summary.attempts,
    )
    return summary


def sample_moments_parallel(model: CouplingModel, config: ChainConfig, chains: int, threads: int = 1) -> SampleSummary:
    """Pool independent chains seeded from SeedSequence(config.seed).spawn(chains)."""
    if chains < 1:
        raise InsufficientDataError("at least one chain is required")
    seeds = chain_seeds(config.seed, chains)
    if threads > 1 and chains > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda ss: _run_chain(model, config, ss), seeds))
    else:
        results = [_run_chain(model, config, ss) for ss in seeds]
    s_sum = sum((r[0] for r in results), np.zeros(model.n_spins))
    ss_sum = sum((r[1] for r in results), np.zeros((model.n_spins, model.n_spins)))
    return _summarize(
        s_sum,
        ss_sum,
        sum(r[2] for r in results),
        sum(r[3] for r in results),
        sum(r[4] for r in results),
    )


def sample_configurations(model: CouplingModel, config: ChainConfig, count: int) -> SpinMatrix:
    """`count` states separated by `thinning` sweeps, after equilibration."""
    if count < 1:
        raise InsufficientDataError("count must be >= 1")
    n = model.n_spins
    chain = _Chain(model, config.seed)
    chain.advance(config.equilibration_sweeps * n)
    rows = chain.record(count, config.resolved_thinning(n) * n)
    logger.debug("drew %d configurations, acceptance %.3f", count, chain.changes / max(chain.attempts, 1))
    return SpinMatrix(model.labels, rows)


def make_synthetic_model(
    n_spins: int, coupling_scale: float, field_scale: float, seed: int, labels: Tuple[str, ...] | None = None
) -> CouplingModel:
    """J_ij ~ U(0, coupling_scale) symmetric with zero diagonal, h_i ~ U(-field_scale, field_scale)."""
    if n_spins < 1:
        raise InsufficientDataError("N must be >= 1")
    if coupling_scale < 0 or field_scale < 0:
        raise ValueError("scales must be nonnegative")
    rng = make_rng(seed)
    upper = np.triu(rng.uniform(0.0, coupling_scale, size=(n_spins, n_spins)), k=1)
    h = rng.uniform(-field_scale, field_scale, size=n_spins)
    return CouplingModel(labels or tuple(f"s{i}" for i in range(n_spins)), upper + upper.T, h)


def _operator_states(n: int) -> np.ndarray:
    if n > MAX_OPERATOR_SPINS:
        raise CapacityError(f"transition operators for N={n} exceed the N <= {MAX_OPERATOR_SPINS} guard")
    codes = np.arange(1 << n, dtype=np.int64)
    return 2.0 * ((codes[:, None] >> np.arange(n)) & 1) - 1.0


def transition_matrix(model: CouplingModel, site: int) -> np.ndarray:
    """Heat-bath kernel P[s, s'] for an update at `site`, over configuration codes."""
    n = model.n_spins
    if not 0 <= site < n:
        raise DimensionMismatchError(f"site {site} outside 0..{n - 1}")
    states = _operator_states(n)
    field = model.h[site] + states @ model.off_diagonal()[site]
    p_up = expit(2.0 * field)
    codes = np.arange(1 << n)
    bit = 1 << site
    P = np.zeros((1 << n, 1 << n))
    P[codes, codes | bit] += p_up
    P[codes, codes & ~bit] += 1.0 - p_up
    return P


def sweep_operator(model: CouplingModel) -> np.ndarray:
    """N random-site updates: (mean_i P_i)^N."""
    n = model.n_spins
    single = sum(transition_matrix(model, i) for i in range(n)) / n
    return np.linalg.matrix_power(single, n)
