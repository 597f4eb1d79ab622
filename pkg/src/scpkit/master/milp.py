"""Branch-and-bound over the LP core: best-bound search, most-fractional branching."""
from __future__ import annotations

import heapq
from typing import Optional

import numpy as np

from ..errors import ResourceExhaustedError
from ..types import Cut, VariableLayout
from .model import LpSolution, MasterModel
from .simplex import LpResult, LpState, solve_lp_arrays

INT_TOL = 1e-6
ABS_GAP = 1e-9
REL_GAP = 1e-9
NODE_BUDGET = 10 ** 6

_T_CACHE_SLOTS = 4


class _TableauCache:
    """Small FIFO of factorized tableaus keyed by basis, shared across nodes."""

    def __init__(self, slots: int = _T_CACHE_SLOTS):
        self.slots = slots
        self._data: dict = {}
        self._order: list = []

    def get(self, basis: np.ndarray):
        return self._data.get(basis.tobytes())

    def put(self, state: LpState) -> None:
        if state.T is None or state.binvb is None:
            return
        key = state.basis.tobytes()
        if key in self._data:
            return
        self._data[key] = (state.T, state.binvb)
        self._order.append(key)
        while len(self._order) > self.slots:
            old = self._order.pop(0)
            self._data.pop(old, None)


def solve_lp(model: MasterModel, warm: Optional[LpState] = None) -> LpResult:
    """LP relaxation of the master (integrality dropped)."""
    A, b, senses, c, lo, hi = model.to_arrays()
    return solve_lp_arrays(A, b, senses, c, lo, hi, warm=warm)


def _warm_from_cache(cache: _TableauCache, basis, vstat) -> LpState:
    hit = cache.get(basis)
    if hit is not None:
        return LpState(basis=basis, vstat=vstat, T=hit[0], binvb=hit[1])
    return LpState(basis=basis, vstat=vstat)


def _fractional_column(x: np.ndarray, int_cols: np.ndarray):
    """Most-fractional integer column, ties to the lowest index; -1 if integral."""
    vals = x[int_cols]
    frac = np.abs(vals - np.round(vals))
    worst = int(np.argmax(frac))  # argmax takes the first maximum: lowest index
    if frac[worst] <= INT_TOL:
        return -1
    return int(int_cols[worst])


def solve_milp(
    model: MasterModel,
    warm: Optional[LpState] = None,
    node_budget: int = NODE_BUDGET,
    stats: Optional[dict] = None,
) -> LpSolution:
    """Optimal mixed-binary solve of the master.

    Best-bound node selection; branch on the most-fractional integer variable;
    children warm start from the parent basis. Raises ResourceExhaustedError
    past the node budget.
    """
    A, b, senses, c, lo0, hi0 = model.to_arrays()
    int_cols = model.integer_columns()
    if stats is None:
        stats = {}
    stats.setdefault("nodes", 0)
    stats.setdefault("bound_history", [])
    stats.setdefault("lp_iterations", 0)

    cache = _TableauCache()

    def node_lp(lo, hi, parent: Optional[LpState]) -> LpResult:
        stats["nodes"] += 1
        if stats["nodes"] > node_budget:
            raise ResourceExhaustedError(f"branch-and-bound node budget {node_budget} exceeded")
        w = parent
        if parent is not None and parent.T is None:
            w = _warm_from_cache(cache, parent.basis, parent.vstat)
        res = solve_lp_arrays(A, b, senses, c, lo, hi, warm=w)
        stats["lp_iterations"] += res.iterations
        cache.put(res.state)
        return res

    root = node_lp(lo0, hi0, warm)
    stats["root_state"] = LpState(basis=root.state.basis, vstat=root.state.vstat)
    if root.status != "optimal":
        return LpSolution(point=root.x, objective=root.objective, status=root.status,
                          basis=(root.state.basis, root.state.vstat))

    incumbent: Optional[LpResult] = None
    inc_obj = np.inf

    def integralize(res: LpResult) -> np.ndarray:
        pt = res.x.copy()
        pt[int_cols] = np.round(pt[int_cols])
        return pt

    heap: list = []
    seq = 0
    branch0 = _fractional_column(root.x, int_cols)
    if branch0 < 0:
        return LpSolution(point=integralize(root), objective=root.objective, status="optimal",
                          basis=(root.state.basis, root.state.vstat), iterations=root.iterations)
    root_shallow = LpState(basis=root.state.basis, vstat=root.state.vstat)
    heapq.heappush(heap, (root.objective, seq, lo0, hi0, root_shallow, root.x, branch0))

    while heap:
        bound, _, lo, hi, state, x, branch = heapq.heappop(heap)
        stats["bound_history"].append(bound)
        if incumbent is not None and bound >= inc_obj - (ABS_GAP + REL_GAP * abs(inc_obj)):
            break  # best-bound order: every remaining node is dominated too

        xb = x[branch]
        for child_side in (0, 1):  # explore the floor side first
            clo = lo.copy()
            chi = hi.copy()
            if child_side == 0:
                chi[branch] = np.floor(xb)
            else:
                clo[branch] = np.ceil(xb)
            if clo[branch] > chi[branch]:
                continue
            shallow = LpState(basis=state.basis, vstat=state.vstat)
            res = node_lp(clo, chi, shallow)
            if res.status != "optimal":
                continue
            if incumbent is not None and res.objective >= inc_obj - (ABS_GAP + REL_GAP * abs(inc_obj)):
                continue
            col = _fractional_column(res.x, int_cols)
            if col < 0:
                incumbent = res
                inc_obj = res.objective
            else:
                seq += 1
                child_shallow = LpState(basis=res.state.basis, vstat=res.state.vstat)
                heapq.heappush(heap, (res.objective, seq, clo, chi, child_shallow, res.x, col))

    if incumbent is None:
        # every branch infeasible below the root
        return LpSolution(point=root.x, objective=np.inf, status="infeasible",
                          basis=(root.state.basis, root.state.vstat))
    return LpSolution(
        point=integralize(incumbent),
        objective=incumbent.objective,
        status="optimal",
        basis=(incumbent.state.basis, incumbent.state.vstat),
        iterations=incumbent.iterations,
    )


class MilpMaster:
    """Engine-facing master: owns the model, extends the warm basis per cut.

    The eta upper bound is pinned from the first cut (a feasible incumbent's
    value plus one bounds the optimal eta from above) and bumped in the rare
    case a later solve presses against it.
    """

    def __init__(self, layout: VariableLayout, lb_eta: float):
        self.layout = layout
        self.lb_eta = float(lb_eta)
        self.model: Optional[MasterModel] = None
        self._state: Optional[LpState] = None
        self.last_stats: dict = {}

    def append_cut(self, cut: Cut) -> None:
        if self.model is None:
            ub = max(self.lb_eta, float(cut.value)) + 1.0
            self.model = MasterModel(self.layout, self.lb_eta, ub)
        self.model.append_cut(cut)
        if self._state is not None:
            m = self.model.n_rows
            n = self.model.n_structural
            new_slack = n + m - 1
            basis = np.append(self._state.basis, np.int64(new_slack))
            vstat = np.insert(self._state.vstat, len(self._state.vstat), np.int8(2))
            self._state = LpState(basis=basis, vstat=vstat)

    def solve(self) -> LpSolution:
        if self.model is None:
            raise RuntimeError("solve called before any cut was appended")
        for _ in range(4):
            stats: dict = {}
            sol = solve_milp(self.model, warm=self._state, stats=stats)
            self.last_stats = stats
            root_state = stats.get("root_state")
            if root_state is not None:
                self._state = LpState(basis=root_state.basis, vstat=root_state.vstat)
            if sol.status != "optimal":
                return sol
            slack_to_cap = self.model.ub_eta - sol.eta
            if slack_to_cap > 1e-6 * (1.0 + abs(self.model.ub_eta)):
                return sol
            # optimum pinned at the artificial eta cap: relax it and re-solve
            self.model.set_eta_upper_bound(self.model.ub_eta + 10.0 * (1.0 + abs(self.model.ub_eta)))
        raise ResourceExhaustedError("eta upper bound kept binding after repeated relaxation")
