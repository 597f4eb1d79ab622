import numpy as np
import pytest

from scpkit.master.qp import QpMaster, QpRiskMaster, solve_qp
from scpkit.types import Cut

from .oracles import qp_by_active_set_enumeration


def test_zero_cut_only():
    master = QpMaster(p=3, C=5.0)
    res = solve_qp(master)
    assert res.theta == pytest.approx(np.zeros(3))
    assert res.xi == pytest.approx(0.0)
    assert res.objective == pytest.approx(0.0)


def test_single_unit_cut_large_c():
    # xi >= 1 - theta_1 with C huge: unconstrained min of 0.5 theta^2 on the
    # active cut gives theta = e1, xi = 0, objective 0.5
    master = QpMaster(p=2, C=1e6)
    master.add_cut(np.array([1.0, 0.0]), 1.0)
    res = solve_qp(master)
    assert res.theta == pytest.approx(np.array([1.0, 0.0]), abs=1e-7)
    assert res.xi == pytest.approx(0.0, abs=1e-9)
    assert res.objective == pytest.approx(0.5, abs=1e-7)
    assert res.converged


def test_random_instances_match_active_set_oracle():
    rng = np.random.default_rng(17)
    for trial in range(12):
        p, ncuts, C = 3, 5, 10.0
        master = QpMaster(p=p, C=C)
        for _ in range(ncuts):
            master.add_cut(rng.normal(size=p), float(rng.normal(loc=0.5)))
        A, b = master.arrays()
        ref_obj, _, _ = qp_by_active_set_enumeration(A, b, C)
        res = solve_qp(master)
        assert res.converged, f"trial {trial}: residual {res.kkt_residual}"
        assert res.objective == pytest.approx(ref_obj, abs=1e-7), f"trial {trial}"


def test_budget_active_requires_pairwise_moves():
    # small C forces sum(alpha) = C; optimum must put the mass on the best cut
    master = QpMaster(p=1, C=0.5)
    master.add_cut(np.array([1.0]), 1.0)
    master.add_cut(np.array([1.0]), 2.0)
    res = solve_qp(master)
    A, b = master.arrays()
    ref_obj, ref_theta, ref_xi = qp_by_active_set_enumeration(A, b, 0.5)
    assert res.objective == pytest.approx(ref_obj, abs=1e-8)
    assert res.theta[0] == pytest.approx(ref_theta[0], abs=1e-7)
    # xi > 0 at the optimum, so the budget must be exhausted
    assert res.xi > 0
    assert res.alpha.sum() == pytest.approx(0.5, abs=1e-9)


def test_duality_gap_and_complementary_slackness():
    rng = np.random.default_rng(40)
    for _ in range(8):
        p = int(rng.integers(1, 5))
        master = QpMaster(p=p, C=float(rng.uniform(0.5, 50)))
        for _ in range(int(rng.integers(1, 7))):
            master.add_cut(rng.normal(size=p), float(rng.normal()))
        res = solve_qp(master)
        scale = 1.0 + abs(res.objective)
        assert res.objective - res.dual_objective <= 1e-7 * scale
        A, b = master.arrays()
        slacks = res.xi - (b - A @ res.theta)
        assert np.max(res.alpha * slacks) <= 1e-6 * scale


def test_master_optimum_nondecreasing_as_cuts_accumulate():
    rng = np.random.default_rng(5)
    adapter = QpRiskMaster(p=4, C=3.0)
    prev = -np.inf
    theta = np.zeros(4)
    for _ in range(6):
        grad = rng.normal(size=4)
        value = float(abs(rng.normal()) + 0.1)
        adapter.append_cut(Cut(anchor=theta, value=value, gradient=grad))
        sol = adapter.solve()
        assert sol.objective >= prev - 1e-9
        prev = sol.objective
        theta = sol.point[:-1]


def test_adapter_reports_risk_epigraph_as_eta():
    adapter = QpRiskMaster(p=2, C=2.0)
    adapter.append_cut(Cut(anchor=np.zeros(2), value=1.0, gradient=np.zeros(2)))
    sol = adapter.solve()
    # flat cut at height 1: xi must reach 1
    assert sol.eta == pytest.approx(1.0, abs=1e-9)
