"""Exhaustive enumeration of small pairwise models and exact moment matching.

Configurations are indexed by integer codes whose bit b is set when s_b = +1,
the same encoding as EmpiricalDistribution.
"""

from __future__ import annotations

import logging
from typing import Dict, Iterator, Tuple, Union

import numpy as np
from scipy.special import entr, logsumexp

from src.lib.errors import CapacityError, DegenerateMomentError, DimensionMismatchError
from src.lib.spin_data import empirical_distribution, smoothed_moments
from src.models.coupling_model import (
    CouplingModel,
    FitReport,
    InformationSummary,
    KLResult,
    ModelDistribution,
)
from src.models.empirical_distribution import EmpiricalDistribution
from src.models.moment_set import MomentSet
from src.models.spin_matrix import SpinMatrix

logger = logging.getLogger(__name__)

MAX_ENUMERATION_SPINS = 25
BLOCK_BITS = 16

DEFAULT_STEP = 0.1
DEFAULT_TOLERANCE = 1e-6
DEFAULT_MAX_ITERATIONS = 50_000

Distribution = Union[ModelDistribution, EmpiricalDistribution]


def _check_capacity(n_spins: int) -> None:
    if n_spins > MAX_ENUMERATION_SPINS:
        raise CapacityError(
            f"exact enumeration of N={n_spins} exceeds the N <= {MAX_ENUMERATION_SPINS} guard; "
            "use the sampler or an approximate inversion instead"
        )


def configurations(n_spins: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Spin rows (+-1 floats) for configuration codes in [start, stop)."""
    stop = (1 << n_spins) if stop is None else stop
    codes = np.arange(start, stop, dtype=np.int64)
    return 2.0 * ((codes[:, None] >> np.arange(n_spins, dtype=np.int64)) & 1) - 1.0


def _blocks(n_spins: int) -> Iterator[Tuple[int, np.ndarray]]:
    total = 1 << n_spins
    step = 1 << BLOCK_BITS
    for start in range(0, total, step):
        yield start, configurations(n_spins, start, min(total, start + step))


def _utilities(model: CouplingModel, s: np.ndarray) -> np.ndarray:
    # 0.5 * s J s over a zero-diagonal J counts every pair once
    return s @ model.h + 0.5 * np.einsum("ki,ki->k", s @ model.off_diagonal(), s)


def utility(model: CouplingModel, config: np.ndarray) -> float:
    """U(s) = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i."""
    s = np.asarray(config, dtype=np.float64)
    if s.shape != (model.n_spins,):
        raise DimensionMismatchError(f"configuration of shape {s.shape} for a model with N={model.n_spins}")
    return float(_utilities(model, s[None, :])[0])


def enumerate_model(model: CouplingModel) -> ModelDistribution:
    """Exact Gibbs distribution over all 2^N configurations."""
    _check_capacity(model.n_spins)
    log_weights = np.empty(1 << model.n_spins, dtype=np.float64)
    for start, s in _blocks(model.n_spins):
        log_weights[start : start + s.shape[0]] = _utilities(model, s)
    log_z = float(logsumexp(log_weights))
    probabilities = np.exp(log_weights - log_z)
    probabilities.setflags(write=False)
    return ModelDistribution(model=model, log_z=log_z, probabilities=probabilities)


def model_moments(dist: ModelDistribution) -> MomentSet:
    n = dist.n_spins
    q = np.zeros(n)
    Q = np.zeros((n, n))
    for start, s in _blocks(n):
        p = dist.probabilities[start : start + s.shape[0]]
        q += p @ s
        Q += (s * p[:, None]).T @ s
    np.fill_diagonal(Q, 1.0)
    return MomentSet(q, 0.5 * (Q + Q.T), sample_count=0)


def _probability_vector(dist: Distribution) -> np.ndarray:
    if isinstance(dist, EmpiricalDistribution):
        _check_capacity(dist.n_spins)
        return dist.to_dense()
    return np.asarray(dist.probabilities)


def entropy(dist: Distribution) -> float:
    """Shannon entropy in nats (plug-in entropy for an EmpiricalDistribution)."""
    if isinstance(dist, EmpiricalDistribution):
        probs = np.fromiter(dist.entries.values(), dtype=np.float64)
    else:
        probs = np.asarray(dist.probabilities)
    return float(entr(probs).sum())


def kl_divergence(P: Distribution, Q: Distribution) -> KLResult:
    """D(P || Q) in nats; terms with P(s) = 0 contribute nothing."""
    if P.n_spins != Q.n_spins:
        raise DimensionMismatchError(f"distributions over N={P.n_spins} and N={Q.n_spins} spins")
    p = _probability_vector(P)
    q = _probability_vector(Q)
    support = p > 0
    if np.any(q[support] <= 0):
        return KLResult(value=float("inf"), out_of_support=True)
    value = float(np.sum(p[support] * (np.log(p[support]) - np.log(q[support]))))
    return KLResult(value=max(value, 0.0))


def _average_log_likelihood(model: CouplingModel, dist: ModelDistribution, moments: MomentSet) -> float:
    pair = 0.5 * float(np.sum(model.off_diagonal() * moments.Q))
    return float(model.h @ moments.q) + pair - dist.log_z


def log_likelihood(model: CouplingModel, moments: MomentSet) -> float:
    """Average log-likelihood per sample of data summarized by `moments`."""
    return _average_log_likelihood(model, enumerate_model(model), moments)


def fit_independent(targets: MomentSet, labels: Tuple[str, ...] | None = None) -> CouplingModel:
    """Independent-spin model: J = 0, h_i = atanh(q_i)."""
    if np.any(np.abs(targets.q) >= 1.0):
        raise DegenerateMomentError("some |q_i| = 1; smooth the moments before fitting")
    n = targets.n_spins
    return CouplingModel(
        labels=labels or tuple(f"s{i}" for i in range(n)),
        J=np.zeros((n, n)),
        h=np.arctanh(targets.q),
    )


def _mismatch(targets: MomentSet, current: MomentSet) -> Tuple[np.ndarray, np.ndarray, float]:
    dq = targets.q - current.q
    dQ = targets.Q - current.Q
    return dq, dQ, float(max(np.abs(dq).max(initial=0.0), np.abs(dQ).max(initial=0.0)))


def fit_exact(
    targets: MomentSet,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    labels: Tuple[str, ...] | None = None,
    step: float = DEFAULT_STEP,
) -> FitReport:
    """Maximum-entropy fit by gradient ascent on the concave log-likelihood.

    The gradient with respect to (h, J) is the moment mismatch. A step that
    lowers the likelihood (an overshoot) is rejected and the step size halved.
    """
    _check_capacity(targets.n_spins)
    if targets.is_degenerate():
        raise DegenerateMomentError("saturated target moments; apply pseudocount smoothing first")
    n = targets.n_spins
    labels = labels or tuple(f"s{i}" for i in range(n))
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)

    h = np.arctanh(targets.q)
    J = np.zeros((n, n))
    model = CouplingModel(labels, J, h)
    dist = enumerate_model(model)
    dq, dQ, err = _mismatch(targets, model_moments(dist))
    objective = _average_log_likelihood(model, dist, targets)

    iteration = 0
    while err > tolerance and iteration < max_iterations:
        iteration += 1
        h_new = h + step * dq
        J_new = J + step * np.where(upper | upper.T, dQ, 0.0)
        candidate = CouplingModel(labels, J_new, h_new)
        candidate_dist = enumerate_model(candidate)
        candidate_objective = _average_log_likelihood(candidate, candidate_dist, targets)
        # rounding noise in log Z must not read as an overshoot
        if candidate_objective < objective - 1e-13 * max(1.0, abs(objective)):
            step *= 0.5
            logger.debug("iteration %d: likelihood fell, step halved to %.3g", iteration, step)
            continue
        h, J, model, objective = h_new, J_new, candidate, candidate_objective
        dq, dQ, err = _mismatch(targets, model_moments(candidate_dist))

    converged = err <= tolerance
    if converged:
        logger.info("exact fit converged after %d iterations (mismatch %.3g)", iteration, err)
    else:
        logger.warning("exact fit stopped after %d iterations with mismatch %.3g", iteration, err)
    return FitReport(model=model, iterations=iteration, max_moment_error=err, converged=converged, tolerance=tolerance)


def multi_information(spins: SpinMatrix, pairwise_model: CouplingModel) -> InformationSummary:
    """I_N = S(P1) - S(Pdata), I_2 = S(P1) - S(P2) and I_2 / I_N in nats.

    The ratio is None when I_N < 1e-12 (no correlations to explain).
    """
    if pairwise_model.n_spins != spins.n_spins:
        raise DimensionMismatchError(f"model with N={pairwise_model.n_spins} for data with N={spins.n_spins}")
    _check_capacity(spins.n_spins)
    independent = fit_independent(smoothed_moments(spins), spins.labels)
    s1 = entropy(enumerate_model(independent))
    s2 = entropy(enumerate_model(pairwise_model))
    s_data = entropy(empirical_distribution(spins))
    i_n = s1 - s_data
    i_2 = s1 - s2
    ratio = i_2 / i_n if i_n >= 1e-12 else None
    return InformationSummary(
        multi_information=i_n,
        pairwise_information=i_2,
        ratio=ratio,
        entropy_independent=s1,
        entropy_pairwise=s2,
        entropy_data=s_data,
    )


def moment_recovery(target: MomentSet, recovered: MomentSet) -> Dict[str, float]:
    """Compare recovered moments with target ones.

    Reports the RMSE of the first moments, its ratio to their RMS value, the
    correlation coefficient between off-diagonal covariances and the RMSE of
    the off-diagonal Pearson coefficients.
    """
    if target.n_spins != recovered.n_spins:
        raise DimensionMismatchError("moment sets over different N")
    rmse = float(np.sqrt(np.mean((target.q - recovered.q) ** 2)))
    rms = float(np.sqrt(np.mean(target.q**2)))
    off = ~np.eye(target.n_spins, dtype=bool)
    a = target.covariance()[off]
    b = recovered.covariance()[off]
    corr = float(np.corrcoef(a, b)[0, 1]) if a.size > 1 and a.std() > 0 and b.std() > 0 else float("nan")
    pearson = target.correlation()[off] - recovered.correlation()[off]
    return {
        "rmse": rmse,
        "rms": rms,
        "relative_rmse": rmse / rms if rms > 0 else float("nan"),
        "covariance_correlation": corr,
        "correlation_rmse": float(np.sqrt(np.mean(pearson**2))) if pearson.size else 0.0,
    }
