"""Closed-form mean-field inversions: naive, TAP and third-order (Tanaka).

All three start from the linear-response relation between the inverse
covariance and the couplings and differ in how many orders of the
small-coupling expansion they keep.
"""

from __future__ import annotations

import logging
from typing import Callable, List, Optional, Tuple

import numpy as np

from src.lib.base_inverter import MomentInverter
from src.lib.errors import ConditioningError, DegenerateMomentError
from src.models.coupling_model import CouplingModel
from src.models.inversion_options import InversionOptions, InversionReport
from src.models.moment_set import MomentSet

logger = logging.getLogger(__name__)

NEWTON_STEPS = 50
OUTER_STEPS = 100
OUTER_TOLERANCE = 1e-13


def default_ridge(cov: np.ndarray) -> float:
    return 1e-8 * float(np.trace(cov)) / cov.shape[0]


def inverse_covariance(moments: MomentSet, ridge: Optional[float] = None) -> np.ndarray:
    """(C + ridge I)^-1 with C = Q - q q^T.

    Raises ConditioningError when the regularized matrix is not positive definite.
    """
    if np.any(np.abs(moments.q) >= 1.0):
        raise DegenerateMomentError("some |q_i| = 1; smooth the moments before inversion")
    cov = moments.covariance()
    ridge = default_ridge(cov) if ridge is None else ridge
    regularized = cov + ridge * np.eye(moments.n_spins)
    eigenvalues = np.linalg.eigvalsh(regularized)
    if eigenvalues[0] <= 1e-13 * max(float(eigenvalues[-1]), 1e-300):
        raise ConditioningError("covariance is singular after regularization", float(eigenvalues[0]))
    inv = np.linalg.inv(regularized)
    return 0.5 * (inv + inv.T)


def _off(matrix: np.ndarray) -> np.ndarray:
    out = np.array(matrix, dtype=np.float64)
    np.fill_diagonal(out, 0.0)
    return out


def _labels(labels: Optional[Tuple[str, ...]], n: int) -> Tuple[str, ...]:
    return labels or tuple(f"s{i}" for i in range(n))


def _tap_couplings(cinv: np.ndarray, q: np.ndarray, warnings: List[str]) -> np.ndarray:
    """Onsager-corrected couplings, branch continuous with the naive solution."""
    a = _off(cinv)
    qq = np.outer(q, q)
    disc = 1.0 - 8.0 * a * qq
    J = np.where(disc >= 0, -2.0 * a / (1.0 + np.sqrt(np.clip(disc, 0.0, None))), -a)
    for i, j in zip(*np.nonzero(np.triu(disc < 0, k=1))):
        warnings.append(f"tap: pair ({i}, {j}) has a negative discriminant; naive value used")
    return _off(J)


def _tap_fields(J: np.ndarray, q: np.ndarray) -> np.ndarray:
    b = 1.0 - q**2
    return np.arctanh(q) - J @ q + q * ((J**2) @ b)


def invert_nmf(moments: MomentSet, options: InversionOptions, labels: Optional[Tuple[str, ...]] = None) -> CouplingModel:
    """J_ij = -(C^-1)_ij off the diagonal; h_i = atanh(q_i) - sum_j J_ij q_j."""
    J = -_off(inverse_covariance(moments, options.ridge))
    h = np.arctanh(moments.q) - J @ moments.q
    return CouplingModel(_labels(labels, moments.n_spins), J, h)


def invert_tap(moments: MomentSet, options: InversionOptions, labels: Optional[Tuple[str, ...]] = None) -> CouplingModel:
    warnings: List[str] = []
    J = _tap_couplings(inverse_covariance(moments, options.ridge), moments.q, warnings)
    for w in warnings:
        logger.warning(w)
    return CouplingModel(_labels(labels, moments.n_spins), J, _tap_fields(J, moments.q), warnings=tuple(warnings))


def _third_order_couplings(cinv: np.ndarray, q: np.ndarray, start: np.ndarray, warnings: List[str]) -> np.ndarray:
    """Solve the third-order linear-response relation pair by pair.

    For i != j:
        -(C^-1)_ij = J + 2 J^2 q_i q_j + (2/3) J^3 (1 - 3 q_i^2)(1 - 3 q_j^2)
                     + 4 q_i q_j J sum_k J_ik J_kj (1 - q_k^2)
    The three-body sum is refreshed from the current estimate in an outer
    fixed-point loop; each inner solve is a Newton iteration started at the
    previous estimate.
    """
    a = _off(cinv)
    b = 1.0 - q**2
    qq = np.outer(q, q)
    c2 = 2.0 * qq
    c3 = (2.0 / 3.0) * np.outer(1.0 - 3.0 * q**2, 1.0 - 3.0 * q**2)
    off = ~np.eye(q.shape[0], dtype=bool)

    J = start.copy()
    for _ in range(OUTER_STEPS):
        triangle = J @ np.diag(b) @ J
        c1 = 1.0 + 4.0 * qq * triangle
        x = J.copy()
        for _ in range(NEWTON_STEPS):
            f = c3 * x**3 + c2 * x**2 + c1 * x + a
            df = 3.0 * c3 * x**2 + 2.0 * c2 * x + c1
            with np.errstate(divide="ignore", invalid="ignore"):
                dx = np.where(off, f / df, 0.0)
            x = x - dx
            if not np.all(np.isfinite(x)) or np.abs(dx).max(initial=0.0) < 1e-15:
                break
        bad = ~np.isfinite(x) & off
        if bad.any():
            for i, j in zip(*np.nonzero(np.triu(bad, k=1))):
                warnings.append(f"tanaka: pair ({i}, {j}) did not converge; TAP value used")
            x = np.where(bad, start, x)
        x = 0.5 * (_off(x) + _off(x).T)
        change = np.abs(x - J).max(initial=0.0)
        J = x
        if change < OUTER_TOLERANCE:
            break
    return J


def _third_order_fields(J: np.ndarray, q: np.ndarray) -> np.ndarray:
    b = 1.0 - q**2
    B = np.diag(b)
    second = q * ((J**2) @ b)
    third_pair = (2.0 / 3.0) * (1.0 - 3.0 * q**2) * ((J**3) @ (q * b))
    third_triangle = q * np.diag(J @ B @ J @ B @ J)
    return np.arctanh(q) - J @ q + second - third_pair + third_triangle


def invert_tanaka(
    moments: MomentSet, options: InversionOptions, labels: Optional[Tuple[str, ...]] = None
) -> CouplingModel:
    """Third-order inversion keeping the diagonal diagnostics.

    The diagonal stores J_ii = 1/(1 - q_i^2) - (C^-1)_ii, the part of the
    diagonal linear response not explained by independent spins. It is
    non-positive up to the ridge and grows in magnitude with the second- and third-order terms.
    """
    warnings: List[str] = []
    cinv = inverse_covariance(moments, options.ridge)
    q = moments.q
    start = _tap_couplings(cinv, q, warnings)
    J = _third_order_couplings(cinv, q, start, warnings)
    h = _third_order_fields(J, q)
    for w in warnings:
        logger.warning(w)
    diagonal = 1.0 / (1.0 - q**2) - np.diag(cinv)
    return CouplingModel(
        _labels(labels, moments.n_spins),
        J + np.diag(diagonal),
        h,
        diagonal_meaningful=True,
        warnings=tuple(warnings),
    )


class MeanFieldInverter(MomentInverter):
    def __init__(self, name: str, solver: Callable[..., CouplingModel]) -> None:
        super().__init__(name=name)
        self._solver = solver

    def invert_moments(
        self,
        moments: MomentSet,
        options: InversionOptions,
        labels: Optional[Tuple[str, ...]] = None,
    ) -> InversionReport:
        model = self._solver(moments, options, labels)
        return InversionReport(self.name, model, converged=True, warnings=model.warnings)


def register(registry: Callable[..., None]) -> None:
    # auto_register passes the registry's `register` function
    registry("nmf", MeanFieldInverter("nmf", invert_nmf))
    registry("tap", MeanFieldInverter("tap", invert_tap))
    registry("tanaka", MeanFieldInverter("tanaka", invert_tanaka))
