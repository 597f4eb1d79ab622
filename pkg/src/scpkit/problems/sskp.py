"""Static stochastic knapsack: rewards minus expected capacity overrun cost.

The engine minimizes the negated objective
    f(z; S) = -r^T z + (c/n) * sum_{j in S} max(W_j^T z - q, 0),
which is convex in z (linear plus a max of affine pieces).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError, ResourceExhaustedError
from ..types import Cut, VariableLayout
from .._kernels import BACKEND, core
from ..master.model import ROW_GE, MasterModel
from .base import SampledOracle

MAX_REFORMULATION_COLUMNS = 2 * 10 ** 4


@dataclass
class SskpData:
    r: np.ndarray
    W: np.ndarray
    c: float
    q: float

    def __post_init__(self):
        self.r = np.ascontiguousarray(self.r, dtype=np.float64)
        self.W = np.ascontiguousarray(self.W, dtype=np.float64)
        if self.W.ndim != 2 or self.r.shape != (self.W.shape[1],):
            raise InvalidArgumentError("W must be N x k with rewards of length k")
        if not (self.c > 0 and self.q > 0):
            raise InvalidArgumentError("need c > 0 and q > 0")

    @property
    def N(self) -> int:
        return self.W.shape[0]

    @property
    def k(self) -> int:
        return self.W.shape[1]


def _rows(data: SskpData, sample) -> np.ndarray:
    indices = getattr(sample, "indices", sample)
    if len(indices) == data.N:
        return data.W
    return data.W[np.asarray(indices, dtype=np.int64)]


def sskp_cost_value(data: SskpData, z: np.ndarray, sample) -> float:
    return core.sskp_cost_value(_rows(data, sample), np.asarray(z, dtype=np.float64),
                                data.q, data.c)


def sskp_cost_gradient(data: SskpData, z: np.ndarray, sample) -> np.ndarray:
    _, grad = core.sskp_cost_value_grad(_rows(data, sample), np.asarray(z, dtype=np.float64),
                                        data.q, data.c)
    return grad


def sskp_full_objective(data: SskpData, z: np.ndarray, sample) -> float:
    """Reward-minus-cost objective being maximized (the engine minimizes its negation)."""
    z = np.asarray(z, dtype=np.float64)
    return float(data.r @ z) - sskp_cost_value(data, z, sample)


def brute_force_optimum(data: SskpData):
    """Exact (objective, z) over all 2^k supports; exponential in k."""
    if data.k > 24:
        raise ResourceExhaustedError("brute force enumeration gated at k <= 24")
    if BACKEND == "numba":
        best, z = core.sskp_enumerate_graycode(data.W, data.r, data.q, data.c)
        return float(best), z
    return _brute_force_chunked(data)


def _brute_force_chunked(data: SskpData, chunk: int = 2048):
    N, k = data.W.shape
    best = -np.inf
    best_z = np.zeros(k, dtype=np.int64)
    n_pat = 1 << k
    bits = np.arange(k)
    for start in range(0, n_pat, chunk):
        codes = np.arange(start, min(start + chunk, n_pat), dtype=np.int64)
        Z = ((codes[:, None] >> bits) & 1).astype(np.float64)
        loads = data.W @ Z.T - data.q
        objs = Z @ data.r - (data.c / N) * np.maximum(loads, 0.0).sum(axis=0)
        i = int(np.argmax(objs))
        if objs[i] > best:
            best = float(objs[i])
            best_z = Z[i].astype(np.int64)
    return best, best_z


def knapsack_layout(k: int) -> VariableLayout:
    return VariableLayout(
        p1=k,
        p2=0,
        integer_lower=np.zeros(k, dtype=np.int64),
        integer_upper=np.ones(k, dtype=np.int64),
    )


class SskpOracle(SampledOracle):
    def __init__(self, data: SskpData):
        self.data = data
        self.layout = knapsack_layout(data.k)
        self.n_data = data.N

    def value(self, point, indices):
        z = np.asarray(point, dtype=np.float64)
        return float(-self.data.r @ z) + sskp_cost_value(self.data, z, indices)

    def value_and_gradient(self, point, indices):
        z = np.asarray(point, dtype=np.float64)
        cost, grad = core.sskp_cost_value_grad(_rows(self.data, indices), z,
                                               self.data.q, self.data.c)
        return float(-self.data.r @ z) + cost, -self.data.r + grad

    def warm_start(self):
        """Greedy fill by reward per expected unit of resource."""
        mu = self.data.W.mean(axis=0)
        order = np.argsort(-(self.data.r / np.maximum(mu, 1e-12)))
        z = np.zeros(self.data.k)
        used = 0.0
        for i in order:
            if used + mu[i] > self.data.q:
                break
            z[i] = 1.0
            used += mu[i]
        return z

    def eta_lower_bound(self):
        return float(-self.data.r.sum())


def sskp_linear_reformulation(data: SskpData) -> MasterModel:
    """Exact MILP restatement with one auxiliary column per scenario.

    max sum(r z) - (c/N) sum(x_j)  s.t.  x_j >= W_j^T z - q, x >= 0, expressed
    as a minimization master whose single cut row ties eta to the linear
    objective. Optimal value of the original problem is -eta*.
    """
    N, k = data.N, data.k
    if k + N + 1 > MAX_REFORMULATION_COLUMNS:
        raise ResourceExhaustedError(
            f"dense reformulation needs {k + N + 1} columns; gated at {MAX_REFORMULATION_COLUMNS}"
        )
    x_upper = np.maximum(data.W, 0.0).sum(axis=1) + abs(data.q) + 1.0
    layout = VariableLayout(
        p1=k,
        p2=N,
        integer_lower=np.zeros(k, dtype=np.int64),
        integer_upper=np.ones(k, dtype=np.int64),
        continuous_lower=np.zeros(N),
        continuous_upper=x_upper,
    )
    lb = float(-data.r.sum())
    ub = float((data.c / N) * x_upper.sum()) + 1.0
    model = MasterModel(layout, lb_eta=lb, ub_eta=ub)
    for j in range(N):  # -W_j^T z + x_j >= -q
        row = np.zeros(k + N + 1)
        row[:k] = -data.W[j]
        row[k + j] = 1.0
        model.add_row(row, ROW_GE, float(-data.q), name=f"scenario{j}")
    grad = np.concatenate([-data.r, np.full(N, data.c / N)])
    model.append_cut(Cut(anchor=np.zeros(k + N), value=0.0, gradient=grad))
    return model
