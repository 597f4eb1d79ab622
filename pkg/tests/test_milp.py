import itertools

import numpy as np
import pytest

from scpkit.errors import ResourceExhaustedError
from scpkit.master.milp import MilpMaster, solve_lp, solve_milp
from scpkit.master.model import ROW_GE, ROW_LE, MasterModel
from scpkit.master.simplex import solve_lp_arrays
from scpkit.types import SENSE_GE, SENSE_LE, Cut, LinearConstraint, VariableLayout

from .oracles import milp_by_pattern_enumeration


def binary_layout(p, constraints=()):
    return VariableLayout(
        p1=p,
        p2=0,
        integer_lower=np.zeros(p, dtype=np.int64),
        integer_upper=np.ones(p, dtype=np.int64),
        constraints=list(constraints),
    )


def cardinality_rows(p, k):
    ones = np.ones(p)
    return [
        LinearConstraint(coeffs=ones, sense=SENSE_LE, rhs=float(k)),
        LinearConstraint(coeffs=-ones, sense=SENSE_GE, rhs=-float(k)),
    ]


def cut_model_value(model, z):
    """Piecewise-linear master objective at an integral z (independent recompute)."""
    vals = [model.lb_eta]
    for cut in model.cuts:
        vals.append(cut.value_at(z))
    return max(vals)


# --- append_cut mechanics ----------------------------------------------------


def test_flat_cut_gives_constant_row():
    model = MasterModel(binary_layout(3), lb_eta=0.0, ub_eta=100.0)
    model.append_cut(Cut(anchor=np.zeros(3), value=5.0, gradient=np.zeros(3)))
    sol = solve_lp(model)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(5.0, abs=1e-9)


def test_cut_tight_at_anchor():
    rng = np.random.default_rng(0)
    anchor = np.array([1.0, 0.0, 1.0])
    grad = rng.normal(size=3)
    cut = Cut(anchor=anchor, value=2.5, gradient=grad)
    assert cut.value_at(anchor) == pytest.approx(2.5, abs=1e-12)
    model = MasterModel(binary_layout(3), lb_eta=-50.0, ub_eta=100.0)
    model.append_cut(cut)
    A, b, senses, c, lo, hi = model.to_arrays()
    x = np.concatenate([anchor, [cut.value_at(anchor)]])
    assert A @ x == pytest.approx(b, abs=1e-12)  # the single row is active


def test_duplicate_cut_is_redundant():
    model = MasterModel(binary_layout(4), lb_eta=0.0, ub_eta=50.0)
    cut = Cut(anchor=np.zeros(4), value=3.0, gradient=np.array([-1.0, -0.5, 0.0, -2.0]))
    model.append_cut(cut)
    first = solve_milp(model)
    model.append_cut(cut)
    second = solve_milp(model)
    assert second.objective == pytest.approx(first.objective, abs=1e-12)


def test_infeasible_model():
    model = MasterModel(binary_layout(2), lb_eta=0.0, ub_eta=0.5)
    model.append_cut(Cut(anchor=np.zeros(2), value=1.0, gradient=np.zeros(2)))  # eta >= 1 vs ub 0.5
    sol = solve_milp(model)
    assert sol.status == "infeasible"


def test_debug_listing_mentions_rows_and_bounds():
    model = MasterModel(binary_layout(2, cardinality_rows(2, 1)), lb_eta=0.0, ub_eta=9.0)
    model.append_cut(Cut(anchor=np.zeros(2), value=1.0, gradient=np.array([-1.0, 0.0])))
    text = model.debug_listing()
    assert "minimize" in text
    assert "cut0" in text and "static0" in text
    assert "bound" in text


# --- solve_milp against enumeration ------------------------------------------


def test_sparse_style_master_single_cut_matches_support_enumeration():
    p, k = 6, 2
    rng = np.random.default_rng(7)
    layout = binary_layout(p, cardinality_rows(p, k))
    model = MasterModel(layout, lb_eta=0.0, ub_eta=10.0)
    warm = np.zeros(p)
    warm[:k] = 1.0
    grad = -np.abs(rng.normal(size=p))
    model.append_cut(Cut(anchor=warm, value=1.7, gradient=grad))
    sol = solve_milp(model)
    assert sol.status == "optimal"

    best = min(
        cut_model_value(model, np.bincount(list(support), minlength=p).astype(float))
        for support in itertools.combinations(range(p), k)
    )
    assert sol.objective == pytest.approx(best, abs=1e-9)
    assert np.sum(sol.point[:p]) == pytest.approx(k)


def test_sskp_style_master_three_cuts_matches_full_enumeration():
    k = 10
    rng = np.random.default_rng(12)
    layout = binary_layout(k)
    model = MasterModel(layout, lb_eta=-200.0, ub_eta=50.0)
    for _ in range(3):
        anchor = rng.integers(0, 2, size=k).astype(float)
        grad = rng.normal(loc=-2.0, size=k)
        model.append_cut(Cut(anchor=anchor, value=float(rng.normal()), gradient=grad))
    sol = solve_milp(model)
    assert sol.status == "optimal"

    best = np.inf
    for code in range(2 ** k):
        z = np.array([(code >> i) & 1 for i in range(k)], dtype=float)
        best = min(best, cut_model_value(model, z))
    assert sol.objective == pytest.approx(best, abs=1e-9)


def test_random_mixed_binary_instances_match_pattern_enumeration():
    rng = np.random.default_rng(2025)
    for trial in range(12):
        n_bin = int(rng.integers(2, 13))
        n_cont = int(rng.integers(0, 3))
        n = n_bin + n_cont
        m = int(rng.integers(1, 6))
        A = rng.normal(size=(m, n)).round(2)
        x0 = rng.uniform(0, 1, size=n)
        b = A @ x0 + rng.uniform(0.0, 0.5, size=m)
        senses = np.full(m, ROW_LE, dtype=np.int64)
        c = rng.normal(size=n).round(2)
        lo = np.zeros(n)
        hi = np.concatenate([np.ones(n_bin), np.full(n_cont, 2.0)])

        layout = VariableLayout(
            p1=n_bin,
            p2=n_cont,
            integer_lower=np.zeros(n_bin, dtype=np.int64),
            integer_upper=np.ones(n_bin, dtype=np.int64),
            continuous_lower=np.zeros(n_cont),
            continuous_upper=np.full(n_cont, 2.0),
            constraints=[LinearConstraint(coeffs=A[i], sense=SENSE_LE, rhs=b[i]) for i in range(m)],
        )
        model = MasterModel(layout, lb_eta=-30.0, ub_eta=30.0)
        # express the linear objective c^T x through the epigraph column
        model.append_cut(Cut(anchor=np.zeros(n), value=0.0, gradient=c))

        sol = solve_milp(model)

        A2 = np.hstack([A, np.zeros((m, 1))])
        obj_row = np.concatenate([-c, [1.0]])
        A2 = np.vstack([A2, obj_row])
        b2 = np.concatenate([b, [0.0]])
        senses2 = np.concatenate([senses, [ROW_GE]]).astype(np.int64)
        c2 = np.concatenate([np.zeros(n), [1.0]])
        lo2 = np.concatenate([lo, [-30.0]])
        hi2 = np.concatenate([hi, [30.0]])
        status, _, ref = milp_by_pattern_enumeration(
            A2, b2, senses2, c2, lo2, hi2, range(n_bin), solve_lp_arrays
        )
        assert sol.status == status, f"trial {trial}"
        if status == "optimal":
            assert sol.objective == pytest.approx(ref, abs=1e-7), f"trial {trial}"
            frac = np.abs(sol.point[:n_bin] - np.round(sol.point[:n_bin]))
            assert np.max(frac) <= 1e-6


def test_best_bound_sequence_monotone():
    rng = np.random.default_rng(3)
    k = 8
    model = MasterModel(binary_layout(k), lb_eta=-100.0, ub_eta=100.0)
    for _ in range(4):
        anchor = rng.integers(0, 2, size=k).astype(float)
        model.append_cut(Cut(anchor=anchor, value=float(rng.normal()),
                             gradient=rng.normal(size=k)))
    stats = {}
    sol = solve_milp(model, stats=stats)
    assert sol.status == "optimal"
    hist = stats["bound_history"]
    assert all(b2 >= b1 - 1e-9 for b1, b2 in zip(hist, hist[1:]))


def test_node_budget_raises():
    rng = np.random.default_rng(9)
    k = 10
    model = MasterModel(binary_layout(k), lb_eta=-100.0, ub_eta=100.0)
    for _ in range(6):
        anchor = rng.integers(0, 2, size=k).astype(float)
        model.append_cut(Cut(anchor=anchor, value=float(rng.normal()),
                             gradient=rng.normal(size=k)))
    with pytest.raises(ResourceExhaustedError):
        solve_milp(model, node_budget=2)


# --- MilpMaster adapter -------------------------------------------------------


def test_adapter_warm_start_across_cuts():
    rng = np.random.default_rng(21)
    p, k = 8, 3
    layout = binary_layout(p, cardinality_rows(p, k))
    master = MilpMaster(layout, lb_eta=0.0)
    warm = np.zeros(p)
    warm[:k] = 1.0
    objs = []
    anchor = warm
    for t in range(5):
        value = float(1.0 + rng.uniform())
        grad = -np.abs(rng.normal(size=p))
        master.append_cut(Cut(anchor=anchor, value=value, gradient=grad))
        sol = master.solve()
        assert sol.status == "optimal"
        objs.append(sol.objective)
        anchor = sol.point[:p]
    # cuts only shrink the epigraph: master optimum is non-decreasing
    assert all(b >= a - 1e-9 for a, b in zip(objs, objs[1:]))
