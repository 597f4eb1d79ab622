"""Cardinality-constrained ridge regression over binary column selectors.

The objective for a support z on rows S is
    (1/n) y_S^T (I_n + gamma * sum_j z_j X_j X_j^T)^{-1} y_S,
evaluated through the rank-k identity: only a k x k SPD system is ever
factorized, never an n x n inverse. Fractional z (used by gradient checks)
enters through column scaling by sqrt(z_j).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ..errors import InvalidArgumentError, NumericFailureError
from ..types import SENSE_GE, SENSE_LE, LinearConstraint, VariableLayout
from .base import SampledOracle

_JITTER = 1e-10
_Z_EPS = 1e-12


@dataclass
class SparseRegressionData:
    X: np.ndarray
    y: np.ndarray
    k: int
    gamma: float

    def __post_init__(self):
        self.X = np.ascontiguousarray(self.X, dtype=np.float64)
        self.y = np.ascontiguousarray(self.y, dtype=np.float64)
        if self.X.ndim != 2 or self.y.shape != (self.X.shape[0],):
            raise InvalidArgumentError("X must be N x p with y of length N")
        if not (1 <= self.k <= self.X.shape[1]):
            raise InvalidArgumentError("need 1 <= k <= p")
        if not self.gamma > 0:
            raise InvalidArgumentError("gamma must be positive")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.y))):
            raise InvalidArgumentError("data must be finite")

    @property
    def N(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


def _solve_small_spd(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        return cho_solve(cho_factor(M, lower=True), rhs)
    except np.linalg.LinAlgError:
        pass
    try:
        jittered = M + _JITTER * np.eye(M.shape[0])
        return cho_solve(cho_factor(jittered, lower=True), rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericFailureError("selected-column system not positive definite") from exc


def _alpha_vector(data: SparseRegressionData, z: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """alpha = (I_n + gamma * sum_j z_j X_j X_j^T)^{-1} y_S without the n x n solve."""
    ys = data.y[indices]
    sel = np.flatnonzero(z > _Z_EPS)
    if sel.size == 0:
        return ys
    V = data.X[np.ix_(indices, sel)] * np.sqrt(z[sel])
    M = np.eye(sel.size) / data.gamma + V.T @ V
    return ys - V @ _solve_small_spd(M, V.T @ ys)


def sparse_reg_value(data: SparseRegressionData, z: np.ndarray, sample) -> float:
    """Objective on the sampled rows; accepts binary or relaxed z in [0, 1]."""
    indices = getattr(sample, "indices", sample)
    n = len(indices)
    if n == 0:
        raise InvalidArgumentError("sample must be nonempty")
    z = np.asarray(z, dtype=np.float64)
    alpha = _alpha_vector(data, z, indices)
    return float(data.y[indices] @ alpha) / n


def sparse_reg_gradient(data: SparseRegressionData, z: np.ndarray, sample) -> np.ndarray:
    indices = getattr(sample, "indices", sample)
    z = np.asarray(z, dtype=np.float64)
    alpha = _alpha_vector(data, z, indices)
    proj = data.X[indices].T @ alpha
    return -(data.gamma / len(indices)) * proj * proj


def sparse_reg_value_and_gradient(data: SparseRegressionData, z: np.ndarray, sample):
    indices = getattr(sample, "indices", sample)
    n = len(indices)
    z = np.asarray(z, dtype=np.float64)
    alpha = _alpha_vector(data, z, indices)
    value = float(data.y[indices] @ alpha) / n
    proj = data.X[indices].T @ alpha
    return value, -(data.gamma / n) * proj * proj


def fit_coefficients(data: SparseRegressionData, support: np.ndarray) -> np.ndarray:
    """Ridge refit on the selected columns: (I_k/gamma + V^T V)^{-1} V^T y."""
    support = np.asarray(support, dtype=np.int64)
    if support.size == 0:
        return np.zeros(0)
    V = data.X[:, support]
    M = np.eye(support.size) / data.gamma + V.T @ V
    return _solve_small_spd(M, V.T @ data.y)


def selection_layout(p: int, k: int) -> VariableLayout:
    ones = np.ones(p)
    return VariableLayout(
        p1=p,
        p2=0,
        integer_lower=np.zeros(p, dtype=np.int64),
        integer_upper=np.ones(p, dtype=np.int64),
        constraints=[
            LinearConstraint(coeffs=ones, sense=SENSE_LE, rhs=float(k)),
            LinearConstraint(coeffs=-ones, sense=SENSE_GE, rhs=-float(k)),
        ],
    )


class SparseRegressionOracle(SampledOracle):
    def __init__(self, data: SparseRegressionData):
        self.data = data
        self.layout = selection_layout(data.p, data.k)
        self.n_data = data.N

    def value(self, point, indices):
        return sparse_reg_value(self.data, point, indices)

    def value_and_gradient(self, point, indices):
        return sparse_reg_value_and_gradient(self.data, point, indices)

    def warm_start(self):
        score = np.abs(self.data.X.T @ self.data.y)
        top = np.argsort(-score)[: self.data.k]
        z = np.zeros(self.data.p)
        z[top] = 1.0
        return z

    def eta_lower_bound(self):
        return 0.0  # quadratic form with a PSD kernel

    def support(self, z: np.ndarray) -> np.ndarray:
        return np.flatnonzero(np.asarray(z) > 0.5)
