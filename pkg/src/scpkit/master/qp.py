"""One-slack quadratic master for continuous-only runs.

Solves min 0.5 ||theta||^2 + C xi subject to xi >= b_i - a_i^T theta over the
accumulated risk cuts (plus xi >= 0), through its dual
max b^T alpha - 0.5 ||A^T alpha||^2, alpha >= 0, sum(alpha) <= C, by projected
coordinate ascent; theta = A^T alpha recovers the primal weights.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..errors import InvalidArgumentError
from ..types import Cut
from .._kernels import core
from .model import LpSolution

MAX_SWEEPS = 10 ** 5
_ASCENT_TOL = 1e-12
_KKT_TOL = 1e-8


@dataclass
class QpMaster:
    """Cut store for the one-slack SVM-style master."""

    p: int
    C: float
    cut_a: List[np.ndarray] = field(default_factory=list)
    cut_b: List[float] = field(default_factory=list)

    def __post_init__(self):
        if not self.C > 0:
            raise InvalidArgumentError("C must be positive")
        if not self.cut_a:
            self.add_cut(np.zeros(self.p), 0.0)  # xi >= 0, always present

    def add_cut(self, a: np.ndarray, b: float) -> None:
        a = np.asarray(a, dtype=np.float64)
        if a.shape != (self.p,) or not np.all(np.isfinite(a)) or not np.isfinite(b):
            raise InvalidArgumentError("cut data must be finite vectors of length p")
        self.cut_a.append(a)
        self.cut_b.append(float(b))

    @property
    def n_cuts(self) -> int:
        return len(self.cut_a)

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.vstack(self.cut_a), np.asarray(self.cut_b, dtype=np.float64)


@dataclass
class QpSolveResult:
    theta: np.ndarray
    xi: float
    objective: float
    alpha: np.ndarray
    sweeps: int
    kkt_residual: float
    converged: bool  # False when the sweep cap fired before the KKT tolerance

    @property
    def dual_objective(self) -> float:
        return float(self._dual)

    _dual: float = 0.0


def _kkt_pieces(A, b, C, alpha, v):
    theta = v
    margins = b - A @ theta
    xi = max(float(np.max(margins)), 0.0)
    objective = 0.5 * float(theta @ theta) + C * xi
    dual = float(b @ alpha) - 0.5 * float(v @ v)
    comp = float(np.max(alpha * (xi - margins)))
    budget = (C - float(alpha.sum())) * xi  # beta * xi
    gap = objective - dual
    kkt = max(comp, abs(budget), gap, 0.0)
    return theta, xi, objective, dual, kkt


def solve_qp(master: QpMaster, alpha0: Optional[np.ndarray] = None) -> QpSolveResult:
    A, b = master.arrays()
    C = master.C
    m = master.n_cuts
    if alpha0 is not None and alpha0.shape == (m,):
        alpha = np.clip(alpha0.astype(np.float64).copy(), 0.0, None)
        total = alpha.sum()
        if total > C:
            alpha *= C / total
    else:
        alpha = np.zeros(m)

    # The gain-based inner stop is quadratic in the gradient while the duality
    # gap is linear in it, so the inner tolerance is tightened progressively
    # until the KKT exit test holds or the sweep budget runs out.
    budget = MAX_SWEEPS
    inner_tol = _ASCENT_TOL
    sweeps_total = 0
    while True:
        v, done, _ = core.qp_dual_ascent(A, b, C, alpha, budget, inner_tol)
        sweeps_total += int(done)
        budget -= int(done)
        theta, xi, objective, dual, kkt = _kkt_pieces(A, b, C, alpha, v)
        scale = 1.0 + abs(objective)
        if kkt <= _KKT_TOL * scale or budget <= 0 or inner_tol < 1e-30:
            break
        inner_tol *= 1e-6

    res = QpSolveResult(
        theta=theta,
        xi=xi,
        objective=objective,
        alpha=alpha,
        sweeps=sweeps_total,
        kkt_residual=float(kkt),
        converged=bool(kkt <= _KKT_TOL * scale),
    )
    res._dual = dual
    return res


class QpRiskMaster:
    """Engine adapter: cuts arrive on the risk term; eta reports its epigraph.

    The reported ``eta`` is xi, the master's under-estimate of the sampled
    risk, so the engine's termination guard compares like with like. The
    regularized total objective lives in ``last_result.objective``.
    """

    def __init__(self, p: int, C: float):
        self.master = QpMaster(p=p, C=C)
        self._alpha: Optional[np.ndarray] = None
        self.last_result: Optional[QpSolveResult] = None

    def append_cut(self, cut: Cut) -> None:
        a = -cut.gradient
        b = float(cut.value - cut.gradient @ cut.anchor)
        self.master.add_cut(a, b)
        if self._alpha is not None:
            self._alpha = np.append(self._alpha, 0.0)

    def solve(self) -> LpSolution:
        res = solve_qp(self.master, alpha0=self._alpha)
        self._alpha = res.alpha
        self.last_result = res
        point = np.concatenate([res.theta, [res.xi]])
        return LpSolution(point=point, objective=res.objective, status="optimal")
