"""Self-contained verification suites: derived oracles and invariants.

Each check rebuilds a seeded instance, recomputes reference values by an
independent route (dense inverses, enumeration, finite differences, tail
bounds), and compares the production path against them. ``run_all`` prints one
pass/fail line per check; the CLI ``verify`` subcommand exits nonzero on any
failure.
"""
from __future__ import annotations

import itertools
import math
import time
from typing import Callable, List, Tuple

import numpy as np

from .datagen import SparseRegGenSpec, SskpGenSpec, gen_sparse_regression, gen_sskp
from .engine import default_master, run_cutting_planes
from .master.milp import solve_milp
from .master.model import ROW_GE, ROW_LE, MasterModel
from .master.qp import QpMaster, solve_qp
from .master.simplex import solve_lp_arrays
from .problems import (
    SparseRegressionData,
    SskpOracle,
    SvmData,
    sparse_reg_gradient,
    sparse_reg_value,
    svm_risk_subgradient,
    svm_risk_value,
)
from .problems.sskp import sskp_cost_gradient, sskp_cost_value
from .sampling import sample_without_replacement
from .types import Cut, EngineConfig, LinearConstraint, VariableLayout


def _sparse_instance(seed=0, N=40, p=8, k=3):
    rng = np.random.default_rng(seed)
    return SparseRegressionData(X=rng.normal(size=(N, p)), y=rng.normal(size=N),
                                k=k, gamma=1.5), rng


def check_woodbury_equivalence() -> Tuple[bool, str]:
    """k x k solve against the dense n x n inverse, n <= 50, tolerance 1e-10."""
    worst = 0.0
    for seed in range(5):
        data, rng = _sparse_instance(seed=seed, N=int(20 + 6 * seed))
        idx = np.arange(data.N)
        for _ in range(4):
            z = np.zeros(data.p)
            z[rng.choice(data.p, size=data.k, replace=False)] = 1.0
            K = np.eye(data.N)
            for j in np.flatnonzero(z):
                K += data.gamma * np.outer(data.X[:, j], data.X[:, j])
            dense = float(data.y @ np.linalg.solve(K, data.y)) / data.N
            fast = sparse_reg_value(data, z, idx)
            worst = max(worst, abs(dense - fast))
    return worst <= 1e-10, f"max |dense - factorized| = {worst:.3e}"


def check_gradient_finite_differences() -> Tuple[bool, str]:
    """Central differences at interior points; 1e-5 relative, kinks excluded."""
    worst = 0.0
    data, rng = _sparse_instance(seed=3)
    idx = np.arange(data.N)
    z = rng.uniform(0.3, 0.7, size=data.p)
    grad = sparse_reg_gradient(data, z, idx)
    h = 1e-5
    for j in range(data.p):
        zp, zm = z.copy(), z.copy()
        zp[j] += h
        zm[j] -= h
        fd = (sparse_reg_value(data, zp, idx) - sparse_reg_value(data, zm, idx)) / (2 * h)
        worst = max(worst, abs(grad[j] - fd) / (1.0 + abs(fd)))

    sskp = gen_sskp(SskpGenSpec(N=60, k=6, seed=4))
    sidx = np.arange(60)
    tried = 0
    while tried < 5:
        z = rng.uniform(0.0, 1.0, size=6)
        if np.min(np.abs(sskp.W @ z - sskp.q)) < 1e-2:
            continue
        tried += 1
        g = sskp_cost_gradient(sskp, z, sidx)
        for j in range(6):
            zp, zm = z.copy(), z.copy()
            zp[j] += h
            zm[j] -= h
            fd = (sskp_cost_value(sskp, zp, sidx) - sskp_cost_value(sskp, zm, sidx)) / (2 * h)
            worst = max(worst, abs(g[j] - fd) / (1.0 + abs(fd)))
    return worst <= 1e-5, f"max relative FD mismatch = {worst:.3e}"


def check_svm_subgradient_inequality() -> Tuple[bool, str]:
    """R(theta') >= R(theta) + g^T (theta' - theta) on 100 probes, 1e-9."""
    rng = np.random.default_rng(7)
    data = SvmData(X=rng.normal(size=(40, 5)),
                   y=np.where(rng.random(40) < 0.5, -1.0, 1.0), C=10.0)
    idx = np.arange(40)
    worst = -np.inf
    for _ in range(5):
        theta = rng.normal(size=5)
        r0 = svm_risk_value(data, theta, idx)
        g = svm_risk_subgradient(data, theta, idx)
        for _ in range(100):
            probe = theta + rng.normal(scale=2.0, size=5)
            gap = (r0 + g @ (probe - theta)) - svm_risk_value(data, probe, idx)
            worst = max(worst, gap)
    return worst <= 1e-9, f"max subgradient-inequality violation = {worst:.3e}"


def _lp_vertex_reference(A, b, senses, c, lo, hi, tol=1e-9):
    m, n = A.shape
    rows = [(A[i], b[i], senses[i]) for i in range(m)]
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        rows.append((e.copy(), lo[j], ROW_GE))
        rows.append((e.copy(), hi[j], ROW_LE))
    best = None
    for combo in itertools.combinations(range(len(rows)), n):
        M = np.array([rows[i][0] for i in combo])
        rhs = np.array([rows[i][1] for i in combo])
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, rhs)
        if np.any(x < lo - tol) or np.any(x > hi + tol):
            continue
        ok = True
        for a, r, s in rows[:m]:
            v = a @ x
            if (s == ROW_LE and v > r + tol) or (s == ROW_GE and v < r - tol):
                ok = False
                break
        if ok:
            val = float(c @ x)
            if best is None or val < best:
                best = val
    return best


def check_lp_against_vertex_enumeration() -> Tuple[bool, str]:
    rng = np.random.default_rng(11)
    worst = 0.0
    agree = 0
    for _ in range(20):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(2, 7))
        A = rng.normal(size=(m, n)).round(3)
        x0 = rng.uniform(-1, 1, size=n)
        senses = rng.integers(0, 2, size=m).astype(np.int64)
        slack = rng.uniform(0, 1, size=m)
        b = A @ x0 + np.where(senses == ROW_LE, slack, -slack)
        c = rng.normal(size=n).round(3)
        lo = np.floor(x0) - 1
        hi = np.ceil(x0) + 1
        ref = _lp_vertex_reference(A, b, senses, c, lo, hi)
        res = solve_lp_arrays(A, b, senses, c, lo, hi)
        if ref is None:
            if res.status != "infeasible":
                return False, "solver found a solution on an enumerated-infeasible LP"
            continue
        if res.status != "optimal":
            return False, f"solver status {res.status} on a feasible LP"
        worst = max(worst, abs(res.objective - ref))
        agree += 1
    return worst <= 1e-7 and agree >= 12, f"{agree} optima compared, max gap {worst:.3e}"


def check_milp_against_enumeration() -> Tuple[bool, str]:
    """Branch-and-bound vs brute-force pattern scan, up to 12 binaries, 1e-7."""
    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(8):
        nb = int(rng.integers(3, 13))
        layout = VariableLayout(
            p1=nb, p2=0,
            integer_lower=np.zeros(nb, dtype=np.int64),
            integer_upper=np.ones(nb, dtype=np.int64),
            constraints=[LinearConstraint(coeffs=np.ones(nb), sense="<=",
                                          rhs=float(rng.integers(1, nb)))],
        )
        model = MasterModel(layout, lb_eta=-50.0, ub_eta=50.0)
        for _ in range(int(rng.integers(1, 5))):
            anchor = rng.integers(0, 2, size=nb).astype(float)
            model.append_cut(Cut(anchor=anchor, value=float(rng.normal()),
                                 gradient=rng.normal(size=nb)))
        sol = solve_milp(model)
        cap = int(layout.constraints[0].rhs)
        best = np.inf
        for code in range(2 ** nb):
            z = np.array([(code >> i) & 1 for i in range(nb)], dtype=float)
            if z.sum() > cap:
                continue
            val = max([model.lb_eta] + [cut.value_at(z) for cut in model.cuts])
            best = min(best, val)
        if sol.status != "optimal":
            return False, "solver failed on a feasible instance"
        worst = max(worst, abs(sol.objective - best))
    return worst <= 1e-7, f"max |bnb - enumeration| = {worst:.3e}"


def check_qp_kkt_and_duality() -> Tuple[bool, str]:
    rng = np.random.default_rng(31)
    worst = 0.0
    for _ in range(10):
        p = int(rng.integers(1, 6))
        master = QpMaster(p=p, C=float(rng.uniform(0.5, 100.0)))
        for _ in range(int(rng.integers(1, 8))):
            master.add_cut(rng.normal(size=p), float(rng.normal()))
        res = solve_qp(master)
        scale = 1.0 + abs(res.objective)
        if not res.converged:
            return False, f"ascent failed to converge (residual {res.kkt_residual:.2e})"
        gap = (res.objective - res.dual_objective) / scale
        worst = max(worst, gap, res.kkt_residual / scale)
    return worst <= 1e-7, f"max scaled KKT/duality residual = {worst:.3e}"


def _hoeffding_case(name, per_sample, subset_value, N, seed):
    n = N // 10
    full_value = float(np.mean(per_sample))
    spread = float(np.max(per_sample) - np.min(per_sample))
    bound = 3.0 * spread * math.sqrt(math.log(100.0) / (2.0 * n))
    devs = np.empty(500)
    for i in range(500):
        s = sample_without_replacement(N, n, seed=seed * 100_000 + i)
        devs[i] = abs(subset_value(s.indices) - full_value)
    q99 = float(np.quantile(devs, 0.99))
    return q99 <= bound, f"{name}: p99 deviation {q99:.4g} vs bound {bound:.4g}"


def check_hoeffding_concentration() -> Tuple[bool, str]:
    """99th-percentile subset deviation within the without-replacement tail bound."""
    N = 2000
    msgs = []
    ok = True

    sskp = gen_sskp(SskpGenSpec(N=N, k=8, seed=17))
    z = np.zeros(8)
    z[:3] = 1.0
    losses = sskp.c * np.maximum(sskp.W @ z - sskp.q, 0.0) - float(sskp.r @ z)
    good, msg = _hoeffding_case(
        "sskp", losses,
        lambda idx: float(-sskp.r @ z) + sskp_cost_value(sskp, z, idx), N, 1)
    ok &= good
    msgs.append(msg)

    rng = np.random.default_rng(19)
    svm = SvmData(X=rng.normal(size=(N, 6)),
                  y=np.where(rng.random(N) < 0.5, -1.0, 1.0), C=1.0)
    theta = rng.normal(size=6)
    hinge = np.maximum(1.0 - svm.y * (svm.X @ theta), 0.0)
    good, msg = _hoeffding_case(
        "svm", hinge, lambda idx: svm_risk_value(svm, theta, idx), N, 2)
    ok &= good
    msgs.append(msg)

    reg = SparseRegressionData(X=rng.normal(size=(N, 10)), y=rng.normal(size=N),
                               k=3, gamma=1.0)
    z = np.zeros(10)
    z[:3] = 1.0
    V = reg.X[:, :3]
    K = np.eye(N) + reg.gamma * (V @ V.T)
    alpha = np.linalg.solve(K, reg.y)
    # y_i * alpha_i averages to the full objective exactly; the subset value is
    # not separable, which the 3x slack in the bound absorbs
    good, msg = _hoeffding_case(
        "sparsereg", reg.y * alpha, lambda idx: sparse_reg_value(reg, z, idx), N, 3)
    ok &= good
    msgs.append(msg)
    return ok, "; ".join(msgs)


def check_full_mode_cut_validity() -> Tuple[bool, str]:
    data = gen_sskp(SskpGenSpec(N=300, k=7, seed=29))
    oracle = SskpOracle(data)
    config = EngineConfig(mode="full", epsilon=1e-9, lb=oracle.eta_lower_bound(), seed=5)
    master = default_master(oracle, config)
    report = run_cutting_planes(oracle, oracle.layout, config, master)
    if report.status != "optimal":
        return False, f"run ended with {report.status}"
    rng = np.random.default_rng(0)
    idx = np.arange(300)
    worst = -np.inf
    for _ in range(60):
        probe = rng.integers(0, 2, size=7).astype(float)
        f_probe = oracle.value(probe, idx)
        scale = 1.0 + abs(f_probe)
        for cut in master.model.cuts:
            worst = max(worst, (cut.value_at(probe) - f_probe) / scale)
    return worst <= 1e-9, f"max scaled overestimate = {worst:.3e}"


def check_stochastic_cut_slack() -> Tuple[bool, str]:
    """Sampled cuts may overshoot the full objective, but rarely beyond 5 sigma."""
    data = gen_sskp(SskpGenSpec(N=2500, k=8, seed=37))
    oracle = SskpOracle(data)
    n = int(np.ceil(10 * np.sqrt(data.N)))
    cuts = []
    for seed in range(6):
        config = EngineConfig(mode="stochastic", epsilon=1e-6,
                              lb=oracle.eta_lower_bound(), seed=seed)
        master = default_master(oracle, config)
        run_cutting_planes(oracle, oracle.layout, config, master)
        cuts.extend(master.model.cuts)
    rng = np.random.default_rng(41)
    idx_full = np.arange(data.N)
    violations = 0
    pairs = 0
    while pairs < 200:
        cut = cuts[int(rng.integers(0, len(cuts)))]
        probe = rng.integers(0, 2, size=8).astype(float)
        f_full = oracle.value(probe, idx_full)
        samples = np.array([
            oracle.value(probe, sample_without_replacement(data.N, n, seed=10_000 + 97 * pairs + j).indices)
            for j in range(30)
        ])
        sigma = float(np.std(samples))
        if cut.value_at(probe) > f_full + 5.0 * max(sigma, 1e-12):
            violations += 1
        pairs += 1
    frac = violations / pairs
    return frac <= 0.01, f"{violations}/{pairs} probes beyond 5 sigma"


def check_deterministic_replay() -> Tuple[bool, str]:
    data = gen_sskp(SskpGenSpec(N=800, k=8, seed=43))
    oracle = SskpOracle(data)

    def run():
        config = EngineConfig(mode="stochastic", epsilon=1e-6,
                              lb=oracle.eta_lower_bound(), seed=99)
        return run_cutting_planes(oracle, oracle.layout, config,
                                  default_master(oracle, config))

    a, b = run(), run()
    same = (a.deterministic_trace() == b.deterministic_trace()
            and np.array_equal(a.z, b.z)
            and a.full_objective_at_solution == b.full_objective_at_solution)
    return same, f"{a.iterations} iterations replayed identically" if same else "traces diverged"


def check_sampling_uniformity() -> Tuple[bool, str]:
    N, n, reps = 100, 30, 10_000
    counts = np.zeros(N)
    for seed in range(reps):
        counts[sample_without_replacement(N, n, seed).indices] += 1
    freq = counts / reps
    dev = float(np.max(np.abs(freq - 0.30)))
    return dev <= 0.02, f"max |frequency - 0.30| = {dev:.4f}"


def check_monotone_master_sequence() -> Tuple[bool, str]:
    data = gen_sskp(SskpGenSpec(N=500, k=8, seed=47))
    oracle = SskpOracle(data)
    config = EngineConfig(mode="full", epsilon=1e-9, lb=oracle.eta_lower_bound(), seed=2)
    report = run_cutting_planes(oracle, oracle.layout, config,
                                default_master(oracle, config))
    etas = [rec.eta for rec in report.trace]
    ok = all(b >= a - 1e-9 for a, b in zip(etas, etas[1:]))
    return ok, f"{len(etas)} master values, monotone: {ok}"


def check_finite_termination() -> Tuple[bool, str]:
    for seed in range(4):
        data = gen_sskp(SskpGenSpec(N=150, k=6, seed=seed))
        oracle = SskpOracle(data)
        config = EngineConfig(mode="stochastic", epsilon=1e-6,
                              lb=oracle.eta_lower_bound(), seed=seed,
                              max_iterations=10 * 2 ** 6)
        report = run_cutting_planes(oracle, oracle.layout, config,
                                    default_master(oracle, config))
        if report.status != "optimal":
            return False, f"seed {seed} ended with {report.status}"
    return True, "all seeded runs terminated optimal under the 10*|Z| cap"


CHECKS: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
    ("woodbury-equivalence", check_woodbury_equivalence),
    ("gradient-finite-differences", check_gradient_finite_differences),
    ("svm-subgradient-inequality", check_svm_subgradient_inequality),
    ("lp-vertex-enumeration", check_lp_against_vertex_enumeration),
    ("milp-vs-enumeration", check_milp_against_enumeration),
    ("qp-kkt-duality", check_qp_kkt_and_duality),
    ("hoeffding-concentration", check_hoeffding_concentration),
    ("full-mode-cut-validity", check_full_mode_cut_validity),
    ("stochastic-cut-slack", check_stochastic_cut_slack),
    ("deterministic-replay", check_deterministic_replay),
    ("sampling-uniformity", check_sampling_uniformity),
    ("monotone-master-sequence", check_monotone_master_sequence),
    ("finite-termination", check_finite_termination),
]


def run_all(verbose: bool = True) -> int:
    """Run every suite; returns the number of failures."""
    failures = 0
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash counts as a failure, not an abort
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        took = time.perf_counter() - t0
        if not ok:
            failures += 1
        if verbose:
            print(f"[{'PASS' if ok else 'FAIL'}] {name} ({took:.1f}s) {detail}")
    return failures
