"""The cutting-plane engine: full-data and subsampled modes share one loop.

Each iteration evaluates the oracle at the incumbent on the current index set,
stops when the master's epigraph value has caught up with the observed value
(within epsilon) at a feasible point, and otherwise installs the tangent cut,
re-solves the master, and draws a fresh subset for the next round.
"""
from __future__ import annotations

import time
from typing import Optional, Protocol

import numpy as np

from .errors import InvalidArgumentError, NumericFailureError, UnsupportedProblemError
from .master.milp import MilpMaster
from .master.model import LpSolution
from .problems.base import SampledOracle
from .sampling import derive_iteration_seed, full_sample, sample_without_replacement
from .types import (
    FULL_SAMPLE_ID,
    MODE_FULL,
    STATUS_INFEASIBLE,
    STATUS_ITERATION_CAP,
    STATUS_OPTIMAL,
    Cut,
    EngineConfig,
    RunReport,
    SubsetSample,
    TraceRecord,
    VariableLayout,
)

_FEAS_TOL = 1e-8


class MasterSolver(Protocol):
    def append_cut(self, cut: Cut) -> None: ...

    def solve(self) -> LpSolution: ...


def evaluate_incumbent_feasibility(point: np.ndarray, layout: VariableLayout) -> float:
    """Worst static-constraint violation at the point, clamped below at zero."""
    point = np.asarray(point, dtype=np.float64)
    if point.shape != (layout.n_vars,):
        raise InvalidArgumentError("point dimensions do not match layout")
    worst = 0.0
    for con in layout.constraints:
        lhs = float(con.coeffs @ point)
        if con.sense == "<=":
            gap = lhs - con.rhs
        elif con.sense == ">=":
            gap = con.rhs - lhs
        else:
            gap = abs(lhs - con.rhs)
        worst = max(worst, gap)
    return worst


def solve_nlp_subproblem(
    oracle: SampledOracle,
    z_fixed: np.ndarray,
    sample: SubsetSample,
    layout: VariableLayout,
) -> np.ndarray:
    """Continuous minimizer with the integer part pinned.

    Trivial for pure-integer problems (empty theta). Continuous-only problems
    never call this hook: their master already produces theta.
    """
    if layout.p2 == 0:
        return np.zeros(0)
    if layout.p1 == 0:
        raise UnsupportedProblemError(
            "continuous-only problems solve theta inside the master; the hook is not used"
        )
    try:
        return np.asarray(oracle.solve_continuous(z_fixed, sample.indices), dtype=np.float64)
    except NotImplementedError as exc:
        raise UnsupportedProblemError(
            "problem declares p2 > 0 but supplies no continuous subproblem solver"
        ) from exc


def default_master(oracle: SampledOracle, config: EngineConfig) -> MasterSolver:
    """MILP master when integer variables exist; otherwise the oracle's own."""
    if oracle.layout.p1 > 0:
        return MilpMaster(oracle.layout, lb_eta=config.lb)
    make = getattr(oracle, "make_master", None)
    if make is None:
        raise UnsupportedProblemError("continuous-only oracle must provide make_master()")
    return make()


def run_cutting_planes(
    oracle: SampledOracle,
    layout: VariableLayout,
    config: EngineConfig,
    master: MasterSolver,
) -> RunReport:
    if layout.p1 != oracle.layout.p1 or layout.p2 != oracle.layout.p2:
        raise InvalidArgumentError("layout dimensions disagree with the oracle")
    N = oracle.n_data
    full = config.mode == MODE_FULL
    if not full:
        n_sub = int(config.n_schedule(N))
        if not (1 <= n_sub <= N):
            raise InvalidArgumentError(f"n_schedule(N) must lie in [1, N], got {n_sub}")

    def draw(iteration: int) -> SubsetSample:
        if full:
            return full_sample(N, iteration=iteration)
        seed_t = derive_iteration_seed(config.seed, iteration)
        return sample_without_replacement(N, n_sub, seed_t, iteration=iteration)

    p1 = layout.p1
    start = np.asarray(oracle.warm_start(), dtype=np.float64)
    if start.shape != (layout.n_vars,):
        raise InvalidArgumentError("warm start has wrong dimension")
    z = start[:p1]
    theta = start[p1:]
    eta = config.lb
    sample = draw(1)

    trace: list = []
    status = STATUS_ITERATION_CAP
    best_value = np.inf
    best_point = start.copy()
    t = 0
    while t < config.max_iterations:
        t += 1
        point = np.concatenate([z, theta])

        t0 = time.perf_counter()
        f_t, g_t = oracle.value_and_gradient(point, sample.indices)
        oracle_secs = time.perf_counter() - t0
        f_t = float(f_t)

        if f_t < best_value:
            best_value = f_t
            best_point = point.copy()

        violation = evaluate_incumbent_feasibility(point, layout)
        if eta >= f_t - config.epsilon and violation <= _FEAS_TOL:
            trace.append(TraceRecord(
                iteration=t,
                sample_seed=FULL_SAMPLE_ID if full else sample.seed,
                eta=float(eta), oracle_value=f_t,
                master_seconds=0.0, oracle_seconds=oracle_secs,
            ))
            status = STATUS_OPTIMAL
            break

        cut = Cut(
            anchor=point, value=f_t, gradient=np.asarray(g_t, dtype=np.float64),
            sample_id=FULL_SAMPLE_ID if full else sample.seed,
        )
        master.append_cut(cut)

        t0 = time.perf_counter()
        sol = master.solve()
        master_secs = time.perf_counter() - t0

        trace.append(TraceRecord(
            iteration=t,
            sample_seed=FULL_SAMPLE_ID if full else sample.seed,
            eta=float(eta), oracle_value=f_t,
            master_seconds=master_secs, oracle_seconds=oracle_secs,
        ))

        if sol.status == "infeasible":
            status = STATUS_INFEASIBLE
            break
        if sol.status != "optimal":
            raise NumericFailureError(f"master returned status {sol.status!r}")

        structural = sol.point[:-1]
        eta = float(sol.point[-1])
        z = np.round(structural[:p1]) + 0.0  # clear negative zeros
        sample = draw(t + 1)
        if p1 == 0:
            theta = structural.copy()
        else:
            theta = solve_nlp_subproblem(oracle, z, sample, layout)

    if status == STATUS_OPTIMAL:
        z_star, theta_star = z, theta
    else:
        z_star, theta_star = best_point[:p1], best_point[p1:]

    if status == STATUS_INFEASIBLE:
        full_value = float("nan")
    else:
        full_value = float(oracle.value(np.concatenate([z_star, theta_star]), np.arange(N)))

    return RunReport(
        status=status,
        z=z_star.astype(np.int64) if p1 else np.zeros(0, dtype=np.int64),
        theta=theta_star,
        eta=float(eta),
        iterations=t,
        trace=trace,
        full_objective_at_solution=full_value,
    )
