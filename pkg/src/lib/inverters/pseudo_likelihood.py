"""Regularized pseudo-likelihood maximization (rPLM).

Each spin gets an independent logistic regression on the others:

    minimize  -(1/T) sum_t log sigma(2 s_i (h_i + sum_{j!=i} K_ij s_j)) + (lambda / T) (h_i^2 + sum_j K_ij^2)

which is the summed penalized pseudo-likelihood divided by T: `lambda` weighs
against the whole sample, so the penalty fades as T grows, while the
gradient tolerance stays per sample.

The field is penalized alongside the couplings so that data in which a spin
never flips still yields a finite optimum. The couplings of the N problems
are then symmetrized into J = (K + K^T) / 2.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, log_expit

from src.lib.base_inverter import BaseInverter
from src.lib.errors import InsufficientDataError
from src.models.coupling_model import CouplingModel
from src.models.inversion_options import InversionOptions, InversionReport
from src.models.spin_matrix import SpinMatrix

logger = logging.getLogger(__name__)


def _objective(
    theta: np.ndarray, design: np.ndarray, sign: np.ndarray, weights: np.ndarray, lam: float
) -> Tuple[float, np.ndarray]:
    z = sign * (design @ theta)
    loss = -float(weights @ log_expit(z)) + lam * float(theta @ theta)
    grad = -(design.T @ (weights * sign * expit(-z))) + 2.0 * lam * theta
    return loss, grad


def _fit_spin(
    i: int, patterns: np.ndarray, weights: np.ndarray, penalty: float, options: InversionOptions
) -> Tuple[np.ndarray, bool, float, int]:
    # column i of the design carries the constant regressor for h_i
    design = patterns.copy()
    design[:, i] = 1.0
    sign = 2.0 * patterns[:, i]
    res = minimize(
        _objective,
        np.zeros(patterns.shape[1]),
        args=(design, sign, weights, penalty),
        jac=True,
        method="L-BFGS-B",
        options={
            "gtol": options.rplm_tolerance,
            "ftol": 1e-14,
            "maxiter": options.rplm_max_iterations,
        },
    )
    grad_norm = float(np.abs(res.jac).max(initial=0.0))
    converged = bool(res.success) or grad_norm <= options.rplm_tolerance
    return np.asarray(res.x, dtype=np.float64), converged, grad_norm, int(res.nit)


def invert_rplm(spins: SpinMatrix, options: InversionOptions, workers: int = 1) -> InversionReport:
    """Fit couplings and fields by per-spin penalized pseudo-likelihood.

    Non-convergence of any per-spin problem is reported through
    `converged=False` and the largest final gradient component.
    """
    if spins.n_samples < 2:
        raise InsufficientDataError(f"pseudo-likelihood needs T >= 2 samples, got {spins.n_samples}")
    n = spins.n_spins
    patterns, counts = np.unique(spins.spins, axis=0, return_counts=True)
    patterns = patterns.astype(np.float64)
    weights = counts / float(spins.n_samples)
    penalty = options.rplm_lambda / float(spins.n_samples)

    indices = range(n)
    if workers > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: _fit_spin(i, patterns, weights, penalty, options), indices))
    else:
        results = [_fit_spin(i, patterns, weights, penalty, options) for i in indices]

    K = np.zeros((n, n))
    h = np.zeros(n)
    warnings: List[str] = []
    grad_norm = 0.0
    converged = True
    for i, (theta, ok, g, nit) in enumerate(results):
        h[i] = theta[i]
        K[i] = theta
        K[i, i] = 0.0
        grad_norm = max(grad_norm, g)
        if not ok:
            converged = False
            warnings.append(f"rplm: spin {i} stopped after {nit} iterations with gradient norm {g:.3g}")
    J = 0.5 * (K + K.T)

    for w in warnings:
        logger.warning(w)
    logger.debug("rplm finished: N=%d, T=%d, max gradient %.3g", n, spins.n_samples, grad_norm)
    model = CouplingModel(spins.labels, J, h, warnings=tuple(warnings))
    return InversionReport("rplm", model, converged=converged, warnings=tuple(warnings), gradient_norm=grad_norm)


class PseudoLikelihoodInverter(BaseInverter):
    def __init__(self, name: str = "rplm", workers: Optional[int] = None) -> None:
        super().__init__(name=name)
        self.workers = workers or 1

    def validate(self, spins: SpinMatrix) -> bool:
        return spins.n_samples >= 2

    def invert(self, spins: SpinMatrix, options: InversionOptions) -> InversionReport:
        return invert_rplm(spins, options, workers=self.workers)


def register(registry: Callable[..., None]) -> None:
    registry("rplm", PseudoLikelihoodInverter())
