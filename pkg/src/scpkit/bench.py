"""Experiment harness: table-style grids, sample-size sweeps, worker pool."""
from __future__ import annotations

import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .covertype import load_covertype
from .datagen import (
    SparseRegGenSpec,
    SskpGenSpec,
    gamma_grid,
    gen_sparse_regression,
    gen_sskp,
)
from .engine import default_master, run_cutting_planes
from .errors import InvalidArgumentError
from .master.milp import solve_milp
from .problems import (
    SparseRegressionData,
    SparseRegressionOracle,
    SskpOracle,
    SvmRiskOracle,
    accuracy,
    brute_force_optimum,
    fit_coefficients,
    sskp_linear_reformulation,
)
from .results import ResultRow, mape, support_fingerprint, thread_pool_size, vector_fingerprint, write_results_csv
from .sampling import default_n_schedule
from .types import MODE_FULL, MODE_STOCHASTIC, EngineConfig, RunReport

BRUTE_FORCE_MAX_K = 16          # 2^k scenario scans stay desk-friendly below this
REFORMULATION_MAX_N = 2000      # dense-tableau baseline gets slow past this


@dataclass
class ExperimentPlan:
    family: str
    cells: Sequence[tuple]
    repetitions: int = 10
    base_seed: int = 0
    epsilon: float = 1e-4
    out_path: Optional[str] = None
    modes: Tuple[str, ...] = (MODE_FULL, MODE_STOCHASTIC)
    select_gamma: bool = True

    def __post_init__(self):
        if self.repetitions < 1:
            raise InvalidArgumentError("repetitions must be >= 1")
        if not self.cells:
            raise InvalidArgumentError("grid must be nonempty")


@dataclass
class GridOutcome:
    rows: List[ResultRow] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def run_engine_once(oracle, mode: str, epsilon: float, seed: int,
                    n_schedule: Callable[[int], int] = default_n_schedule,
                    max_iterations: int = 500) -> Tuple[RunReport, float]:
    config = EngineConfig(mode=mode, epsilon=epsilon, lb=oracle.eta_lower_bound(),
                          seed=seed, n_schedule=n_schedule, max_iterations=max_iterations)
    master = default_master(oracle, config)
    t0 = time.perf_counter()
    report = run_cutting_planes(oracle, oracle.layout, config, master)
    return report, time.perf_counter() - t0


def _row(experiment, family, N, p_or_k, sigma, mode, n, seed, report, total,
         objective, metric, fingerprint) -> ResultRow:
    return ResultRow(
        experiment=experiment, family=family, N=N, p_or_k=p_or_k, sigma=sigma,
        mode=mode, n=n, seed=seed,
        master_seconds=report.master_seconds, oracle_seconds=report.oracle_seconds,
        total_seconds=total, iterations=report.iterations,
        objective=objective, metric=metric, fingerprint=fingerprint,
    )


# --- sparse regression --------------------------------------------------------


def regression_metric(train: SparseRegressionData, eval_data: SparseRegressionData,
                      support: np.ndarray) -> float:
    beta = fit_coefficients(train, support)
    pred = eval_data.X[:, support] @ beta if support.size else np.zeros(eval_data.N)
    return mape(pred, eval_data.y)


def run_sparse_mode(instance, mode: str, epsilon: float, seed: int,
                    gammas: Sequence[float],
                    n_schedule: Callable[[int], int] = default_n_schedule):
    """Engine run per gamma, selected on validation MAPE; returns the winner."""
    best = None
    for g in gammas:
        train = SparseRegressionData(X=instance.train.X, y=instance.train.y,
                                     k=instance.train.k, gamma=g)
        oracle = SparseRegressionOracle(train)
        report, total = run_engine_once(oracle, mode, epsilon, seed, n_schedule)
        support = oracle.support(report.z)
        val = regression_metric(train, instance.validation, support)
        if best is None or val < best[0]:
            best = (val, g, train, report, total, support)
    val, g, train, report, total, support = best
    test_mape = regression_metric(train, instance.test, support)
    return report, total, support, test_mape, g


def run_table1(plan: ExperimentPlan) -> GridOutcome:
    """Sparse-regression grid: both modes on identical instances, per cell."""
    out = GridOutcome()

    def one_cell(cell):
        N, p, k, sigma = cell
        rows = []
        for rep in range(plan.repetitions):
            seed = plan.base_seed + rep
            inst = gen_sparse_regression(SparseRegGenSpec(N=N, p=p, k=k, sigma=sigma, seed=seed))
            gammas = gamma_grid(inst.train.X) if plan.select_gamma else [1.0 / inst.train.X.shape[0]]
            for mode in plan.modes:
                report, total, support, test_mape, g = run_sparse_mode(
                    inst, mode, plan.epsilon, seed, gammas)
                n_used = N if mode == MODE_FULL else default_n_schedule(N)
                rows.append(_row(
                    "table1", "sparsereg", N, p, sigma, mode, n_used, seed,
                    report, total, report.full_objective_at_solution, test_mape,
                    support_fingerprint(support)))
        return rows

    _dispatch(plan.cells, one_cell, out)
    if plan.out_path:
        write_results_csv(out.rows, plan.out_path)
    return out


# --- sskp ----------------------------------------------------------------------


def run_table3(plan: ExperimentPlan) -> GridOutcome:
    """SSKP grid: reference optimum, both engine modes, linear reformulation."""
    out = GridOutcome()

    def one_cell(cell):
        N, k = cell
        rows = []
        for rep in range(plan.repetitions):
            seed = plan.base_seed + rep
            data = gen_sskp(SskpGenSpec(N=N, k=k, seed=seed))
            oracle = SskpOracle(data)

            full_report, full_total = run_engine_once(oracle, MODE_FULL, plan.epsilon, seed)
            full_obj = -full_report.full_objective_at_solution

            if k <= BRUTE_FORCE_MAX_K:
                t0 = time.perf_counter()
                reference, _ = brute_force_optimum(data)
                bf_secs = time.perf_counter() - t0
                rows.append(ResultRow(
                    experiment="table3", family="sskp", N=N, p_or_k=k, sigma=0.0,
                    mode="bruteforce", n=N, seed=seed, master_seconds=0.0,
                    oracle_seconds=0.0, total_seconds=bf_secs, iterations=0,
                    objective=reference, metric=1.0, fingerprint=""))
            else:
                reference = full_obj  # exact full-mode run stands in as the optimum

            scale = abs(reference) if abs(reference) > 1e-12 else 1.0
            rows.append(_row("table3", "sskp", N, k, 0.0, MODE_FULL, N, seed,
                             full_report, full_total, full_obj, full_obj / scale,
                             support_fingerprint(np.flatnonzero(full_report.z))))

            if MODE_STOCHASTIC in plan.modes:
                rep_report, rep_total = run_engine_once(oracle, MODE_STOCHASTIC,
                                                        plan.epsilon, seed)
                obj = -rep_report.full_objective_at_solution
                rows.append(_row("table3", "sskp", N, k, 0.0, MODE_STOCHASTIC,
                                 default_n_schedule(N), seed, rep_report, rep_total,
                                 obj, obj / scale,
                                 support_fingerprint(np.flatnonzero(rep_report.z))))

            if N <= REFORMULATION_MAX_N:
                t0 = time.perf_counter()
                model = sskp_linear_reformulation(data)
                sol = solve_milp(model)
                ref_secs = time.perf_counter() - t0
                obj = -sol.objective
                rows.append(ResultRow(
                    experiment="table3", family="sskp", N=N, p_or_k=k, sigma=0.0,
                    mode="reformulation", n=N, seed=seed, master_seconds=ref_secs,
                    oracle_seconds=0.0, total_seconds=ref_secs, iterations=0,
                    objective=obj, metric=obj / scale,
                    fingerprint=support_fingerprint(np.flatnonzero(np.round(sol.point[:k])))))
        return rows

    _dispatch(plan.cells, one_cell, out)
    if plan.out_path:
        write_results_csv(out.rows, plan.out_path)
    return out


# --- svm -----------------------------------------------------------------------


def run_table2(plan: ExperimentPlan, covertype_path: str, C: float = 1e6) -> GridOutcome:
    """Covertype SVM grid: accuracy and time per mode at each N."""
    out = GridOutcome()

    def one_cell(cell):
        (N,) = cell
        rows = []
        for rep in range(plan.repetitions):
            seed = plan.base_seed + rep
            train, test = load_covertype(covertype_path, seed=seed, N=N, C=C)
            oracle = SvmRiskOracle(train)
            for mode in plan.modes:
                report, total = run_engine_once(oracle, mode, plan.epsilon, seed)
                acc = accuracy(test, report.theta)
                n_used = N if mode == MODE_FULL else default_n_schedule(N)
                rows.append(_row("table2", "svm", N, train.p, 0.0, mode, n_used, seed,
                                 report, total, report.full_objective_at_solution,
                                 acc, vector_fingerprint(report.theta)))
        return rows

    _dispatch(plan.cells, one_cell, out)
    if plan.out_path:
        write_results_csv(out.rows, plan.out_path)
    return out


# --- sample-size sweeps ----------------------------------------------------------


def constant_schedule(n: int) -> Callable[[int], int]:
    return lambda N: min(N, n)


def run_samplesize_sweep(plan: ExperimentPlan, n_grid: Sequence[int]) -> GridOutcome:
    """Agreement (sparsereg) or normalized objective (sskp) per (N, n) cell."""
    if plan.family not in ("sparsereg", "sskp"):
        raise InvalidArgumentError("sweep supports the sparsereg and sskp families")
    out = GridOutcome()

    def sparse_cell(cell):
        N, p, k, sigma = cell
        rows = []
        for rep in range(plan.repetitions):
            seed = plan.base_seed + rep
            inst = gen_sparse_regression(SparseRegGenSpec(N=N, p=p, k=k, sigma=sigma, seed=seed))
            gamma = gamma_grid(inst.train.X)[2]  # mid-grid value; identical across arms
            train = SparseRegressionData(X=inst.train.X, y=inst.train.y, k=k, gamma=gamma)
            oracle = SparseRegressionOracle(train)
            ref_report, _ = run_engine_once(oracle, MODE_FULL, plan.epsilon, seed)
            ref_support = oracle.support(ref_report.z)
            for n in n_grid:
                report, total = run_engine_once(oracle, MODE_STOCHASTIC, plan.epsilon,
                                                seed, n_schedule=constant_schedule(n))
                support = oracle.support(report.z)
                agree = 1.0 if np.array_equal(support, ref_support) else 0.0
                rows.append(_row("sweep", "sparsereg", N, p, sigma, MODE_STOCHASTIC,
                                 min(N, n), seed, report, total,
                                 report.full_objective_at_solution, agree,
                                 support_fingerprint(support)))
        return rows

    def sskp_cell(cell):
        N, k = cell
        rows = []
        for rep in range(plan.repetitions):
            seed = plan.base_seed + rep
            data = gen_sskp(SskpGenSpec(N=N, k=k, seed=seed))
            oracle = SskpOracle(data)
            if k <= BRUTE_FORCE_MAX_K:
                reference, _ = brute_force_optimum(data)
            else:
                ref_report, _ = run_engine_once(oracle, MODE_FULL, plan.epsilon, seed)
                reference = -ref_report.full_objective_at_solution
            scale = abs(reference) if abs(reference) > 1e-12 else 1.0
            for n in n_grid:
                report, total = run_engine_once(oracle, MODE_STOCHASTIC, plan.epsilon,
                                                seed, n_schedule=constant_schedule(n))
                obj = -report.full_objective_at_solution
                rows.append(_row("sweep", "sskp", N, k, 0.0, MODE_STOCHASTIC,
                                 min(N, n), seed, report, total, obj, obj / scale,
                                 support_fingerprint(np.flatnonzero(report.z))))
        return rows

    _dispatch(plan.cells, sparse_cell if plan.family == "sparsereg" else sskp_cell, out)
    if plan.out_path:
        write_results_csv(out.rows, plan.out_path)
    return out


# --- pool ------------------------------------------------------------------------


def _dispatch(cells, fn, out: GridOutcome) -> None:
    workers = min(thread_pool_size(), len(cells))
    if workers <= 1:
        for cell in cells:
            _run_cell(cell, fn, out)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(_run_cell_collect, cell, fn): cell for cell in cells}
        for fut in futures:
            rows, err = fut.result()
            out.rows.extend(rows)
            if err:
                out.failures.append(err)


def _run_cell(cell, fn, out: GridOutcome) -> None:
    rows, err = _run_cell_collect(cell, fn)
    out.rows.extend(rows)
    if err:
        out.failures.append(err)


def _run_cell_collect(cell, fn):
    try:
        return fn(cell), None
    except Exception:
        return [], f"cell {cell!r} failed:\n{traceback.format_exc()}"


# --- default desk-scale grids ------------------------------------------------------


def table1_cells(full_scale: bool = False):
    if full_scale:
        N_block = [(10 ** 3, 100, 10, 0.1), (10 ** 4, 100, 10, 0.1),
                   (10 ** 5, 100, 10, 0.1), (10 ** 6, 100, 10, 0.1)]
        p_block = [(10 ** 5, 10 ** 3, 10, 0.1), (10 ** 5, 10 ** 4, 10, 0.1)]
        k_block = [(10 ** 5, 100, 20, 0.1), (10 ** 5, 100, 50, 0.1)]
        s_block = [(10 ** 5, 100, 10, 0.2), (10 ** 5, 100, 10, 0.3)]
        return N_block + p_block + k_block + s_block
    return [
        (10 ** 3, 50, 5, 0.1), (10 ** 4, 50, 5, 0.1),
        (10 ** 3, 100, 10, 0.1),
        (10 ** 3, 50, 10, 0.1),
        (10 ** 3, 50, 5, 0.2), (10 ** 3, 50, 5, 0.3),
    ]


def table2_cells(full_scale: bool = False):
    return [(10 ** 3,), (10 ** 4,), (10 ** 5,)] if full_scale else [(10 ** 3,), (10 ** 4,)]


def table3_cells(full_scale: bool = False):
    if full_scale:
        return [(N, k) for k in (10, 20, 50) for N in (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6)]
    return [(10 ** 3, 10), (10 ** 4, 10), (10 ** 4, 20)]


def sweep_cells(family: str, full_scale: bool = False):
    if family == "sparsereg":
        cells = [(10 ** 4, 50, 5, 0.1)]
        if full_scale:
            cells = [(10 ** 4, 100, 10, 0.1), (10 ** 5, 100, 10, 0.1)]
        return cells
    cells = [(10 ** 4, 10)]
    if full_scale:
        cells = [(10 ** 4, 50), (10 ** 5, 50)]
    return cells


def sweep_n_grid(family: str, full_scale: bool = False):
    if family == "sparsereg":
        return (50, 100, 300, 1000) if not full_scale else (30, 100, 320, 1000, 3200)
    return (32, 100, 316, 1000) if not full_scale else (10, 32, 100, 320, 1000, 3200)
