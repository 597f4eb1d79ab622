"""Linear SVM risk: mean hinge loss with its minimization subgradient.

Only the risk term is linearized by cuts; the quadratic regularizer stays
inside the QP master. Classifier is sign(theta^T x), no intercept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError
from ..types import VariableLayout
from .._kernels import core
from .base import SampledOracle

# test hook: flipping this breaks the subgradient on purpose so the
# verification suite can prove it would catch a corrupted gradient
_corrupt_subgradient_for_tests = False


@dataclass
class SvmData:
    X: np.ndarray
    y: np.ndarray
    C: float

    def __post_init__(self):
        self.X = np.ascontiguousarray(self.X, dtype=np.float64)
        self.y = np.ascontiguousarray(self.y, dtype=np.float64)
        if self.X.ndim != 2 or self.y.shape != (self.X.shape[0],):
            raise InvalidArgumentError("X must be N x p with labels of length N")
        if not np.all(np.isin(self.y, (-1.0, 1.0))):
            raise InvalidArgumentError("labels must be -1 or +1")
        if not self.C > 0:
            raise InvalidArgumentError("C must be positive")

    @property
    def N(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


def _rows(data: SvmData, sample):
    indices = getattr(sample, "indices", sample)
    if len(indices) == data.N:
        return data.X, data.y
    idx = np.asarray(indices, dtype=np.int64)
    return data.X[idx], data.y[idx]


def svm_risk_value(data: SvmData, theta: np.ndarray, sample) -> float:
    X, y = _rows(data, sample)
    return core.hinge_value(X, y, np.asarray(theta, dtype=np.float64))


def svm_risk_subgradient(data: SvmData, theta: np.ndarray, sample) -> np.ndarray:
    X, y = _rows(data, sample)
    _, grad = core.hinge_value_grad(X, y, np.asarray(theta, dtype=np.float64))
    if _corrupt_subgradient_for_tests:
        grad = -grad
    return grad


def accuracy(data: SvmData, theta: np.ndarray) -> float:
    pred = np.where(data.X @ theta >= 0, 1.0, -1.0)
    return float(np.mean(pred == data.y))


def svm_layout(p: int, C: float) -> VariableLayout:
    # objective at theta = 0 is C * R(0) = C, so ||theta*||^2 <= 2C
    radius = math.sqrt(2.0 * C) + 1.0
    return VariableLayout(
        p1=0,
        p2=p,
        continuous_lower=np.full(p, -radius),
        continuous_upper=np.full(p, radius),
    )


class SvmRiskOracle(SampledOracle):
    """Continuous-only oracle over the risk term R(theta)."""

    def __init__(self, data: SvmData):
        self.data = data
        self.layout = svm_layout(data.p, data.C)
        self.n_data = data.N

    def value(self, point, indices):
        return svm_risk_value(self.data, point, indices)

    def value_and_gradient(self, point, indices):
        X, y = _rows(self.data, indices)
        value, grad = core.hinge_value_grad(X, y, np.asarray(point, dtype=np.float64))
        if _corrupt_subgradient_for_tests:
            grad = -grad
        return value, grad

    def warm_start(self):
        return np.zeros(self.data.p)

    def eta_lower_bound(self):
        return 0.0  # hinge risk is nonnegative

    def make_master(self):
        from ..master.qp import QpRiskMaster

        return QpRiskMaster(p=self.data.p, C=self.data.C)
