import numpy as np
import pytest

from scpkit.master.milp import solve_milp
from scpkit.master.simplex import solve_lp_arrays
from scpkit.problems import (
    SskpData,
    SskpOracle,
    brute_force_optimum,
    sskp_cost_gradient,
    sskp_cost_value,
    sskp_full_objective,
    sskp_linear_reformulation,
)
from scpkit.problems.sskp import _brute_force_chunked
from scpkit.sampling import full_sample, sample_without_replacement

from .oracles import sskp_cost_direct


def random_data(rng, N=50, k=10, c=4.0, q=20.0):
    W = rng.normal(loc=25.0, scale=10.0, size=(N, k))
    r = rng.uniform(10, 20, size=k)
    return SskpData(r=r, W=W, c=c, q=q)


def test_zero_selection_costs_nothing():
    rng = np.random.default_rng(1)
    data = random_data(rng)
    s = full_sample(50)
    assert sskp_cost_value(data, np.zeros(10), s) == 0.0
    assert sskp_full_objective(data, np.zeros(10), s) == 0.0


def test_single_scenario_overrun_of_one():
    data = SskpData(r=np.array([5.0]), W=np.array([[21.0]]), c=4.0, q=20.0)
    s = full_sample(1)
    z = np.array([1.0])
    assert sskp_cost_value(data, z, s) == pytest.approx(4.0 * 1.0, abs=1e-12)


def test_cost_matches_direct_summation():
    rng = np.random.default_rng(5)
    data = random_data(rng)
    s = sample_without_replacement(50, 23, seed=4)
    for _ in range(5):
        z = rng.integers(0, 2, size=10).astype(float)
        ours = sskp_cost_value(data, z, s)
        ref = sskp_cost_direct(data.W, z, data.q, data.c, s.indices)
        assert ours == pytest.approx(ref, abs=1e-12)


def test_gradient_zero_when_no_scenario_active():
    rng = np.random.default_rng(2)
    data = random_data(rng)
    g = sskp_cost_gradient(data, np.zeros(10), full_sample(50))
    assert np.all(g == 0.0)


def test_gradient_all_scenarios_active():
    rng = np.random.default_rng(3)
    W = rng.uniform(30, 40, size=(20, 4))  # any single item overruns q = 20
    data = SskpData(r=np.ones(4) * 12, W=W, c=4.0, q=20.0)
    z = np.ones(4)
    g = sskp_cost_gradient(data, z, full_sample(20))
    assert g == pytest.approx((4.0 / 20) * W.sum(axis=0), rel=1e-12)


def test_gradient_matches_finite_differences_off_kinks():
    rng = np.random.default_rng(9)
    data = random_data(rng, N=40)
    s = full_sample(40)
    h = 1e-5  # exact on the linear pieces; large enough to beat fp cancellation
    checked = 0
    for _ in range(10):
        z = rng.uniform(0.0, 1.0, size=10)
        loads = data.W @ z - data.q
        if np.min(np.abs(loads)) < 1e-2:  # resample away from kinks
            continue
        g = sskp_cost_gradient(data, z, s)
        for j in range(10):
            zp, zm = z.copy(), z.copy()
            zp[j] += h
            zm[j] -= h
            fd = (sskp_cost_value(data, zp, s) - sskp_cost_value(data, zm, s)) / (2 * h)
            assert g[j] == pytest.approx(fd, abs=1e-6)
        checked += 1
    assert checked >= 3


def test_full_objective_trivial_cases():
    data = SskpData(r=np.array([10.0]), W=np.zeros((5, 1)), c=4.0, q=20.0)
    s = full_sample(5)
    assert sskp_full_objective(data, np.zeros(1), s) == 0.0
    assert sskp_full_objective(data, np.ones(1), s) == pytest.approx(10.0)


def test_brute_force_is_max_over_full_objective():
    rng = np.random.default_rng(21)
    data = random_data(rng, N=30, k=8)
    best, zbest = brute_force_optimum(data)
    s = full_sample(30)
    ref = max(
        sskp_full_objective(data, np.array([(code >> i) & 1 for i in range(8)], dtype=float), s)
        for code in range(2 ** 8)
    )
    assert best == pytest.approx(ref, abs=1e-10)
    assert sskp_full_objective(data, zbest.astype(float), s) == pytest.approx(best, abs=1e-10)


def test_graycode_and_chunked_enumeration_agree():
    rng = np.random.default_rng(33)
    data = random_data(rng, N=25, k=9)
    b1, z1 = brute_force_optimum(data)
    b2, z2 = _brute_force_chunked(data)
    assert b1 == pytest.approx(b2, abs=1e-9)
    assert np.array_equal(z1, z2)


def test_oracle_value_and_gradient_consistent():
    rng = np.random.default_rng(6)
    data = random_data(rng)
    oracle = SskpOracle(data)
    s = sample_without_replacement(50, 20, seed=8)
    z = rng.integers(0, 2, size=10).astype(float)
    v, g = oracle.value_and_gradient(z, s)
    assert v == pytest.approx(oracle.value(z, s), abs=1e-12)
    assert v == pytest.approx(-data.r @ z + sskp_cost_value(data, z, s), abs=1e-12)
    assert g == pytest.approx(-data.r + sskp_cost_gradient(data, z, s), rel=1e-12)


def test_warm_start_greedy_respects_capacity():
    rng = np.random.default_rng(14)
    data = random_data(rng, N=200, k=12)
    oracle = SskpOracle(data)
    z = oracle.warm_start()
    mu = data.W.mean(axis=0)
    assert float(mu @ z) <= data.q
    assert oracle.eta_lower_bound() == pytest.approx(-data.r.sum())


def test_linear_reformulation_matches_brute_force():
    rng = np.random.default_rng(100)
    data = random_data(rng, N=120, k=6, q=30.0)
    best, zbest = brute_force_optimum(data)
    model = sskp_linear_reformulation(data)
    sol = solve_milp(model)
    assert sol.status == "optimal"
    assert -sol.objective == pytest.approx(best, rel=1e-9, abs=1e-9)
    z = sol.point[:6]
    assert np.array_equal(np.round(z).astype(np.int64), zbest)


def test_linear_reformulation_lp_with_fixed_z_reproduces_objective():
    rng = np.random.default_rng(101)
    data = random_data(rng, N=80, k=5, q=40.0)
    best, zbest = brute_force_optimum(data)
    model = sskp_linear_reformulation(data)
    A, b, senses, c, lo, hi = model.to_arrays()
    lo2, hi2 = lo.copy(), hi.copy()
    lo2[:5] = zbest
    hi2[:5] = zbest
    res = solve_lp_arrays(A, b, senses, c, lo2, hi2)
    assert res.status == "optimal"
    assert -res.objective == pytest.approx(best, abs=1e-9)


def test_linear_reformulation_all_zero_w_selects_everything():
    data = SskpData(r=np.array([3.0, 4.0, 5.0]), W=np.zeros((40, 3)), c=4.0, q=10.0)
    model = sskp_linear_reformulation(data)
    sol = solve_milp(model)
    assert -sol.objective == pytest.approx(12.0, abs=1e-9)
    assert np.all(np.round(sol.point[:3]) == 1)


def test_linear_reformulation_column_gate():
    from scpkit.errors import ResourceExhaustedError

    data = SskpData(r=np.ones(2) * 10, W=np.ones((30000, 2)), c=4.0, q=20.0)
    with pytest.raises(ResourceExhaustedError):
        sskp_linear_reformulation(data)
