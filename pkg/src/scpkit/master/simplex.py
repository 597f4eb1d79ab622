"""LP interface over the simplex kernel: slack form, warm starts, retries."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..errors import NumericFailureError
from .._kernels import core
from .model import ROW_EQ, ROW_GE, ROW_LE

LP_STATUS_TEXT = {
    core.LP_OPTIMAL: "optimal",
    core.LP_INFEASIBLE: "infeasible",
    core.LP_UNBOUNDED: "unbounded",
}

_ROW_TOL = 1e-7
_BOUND_TOL = 1e-8


@dataclass
class LpState:
    """Extended-space warm-start state (basis plus factorized tableau)."""

    basis: np.ndarray
    vstat: np.ndarray
    T: Optional[np.ndarray] = None
    binvb: Optional[np.ndarray] = None


@dataclass
class LpResult:
    status: str
    x: np.ndarray           # structural columns only
    objective: float
    state: LpState
    iterations: int


def build_extended(A, b, senses, lo, hi):
    """Equality form: one slack per row, bounds encoding the sense."""
    m, n = A.shape
    ntot = n + m
    A_ext = np.zeros((m, ntot))
    A_ext[:, :n] = A
    lo_ext = np.empty(ntot)
    hi_ext = np.empty(ntot)
    lo_ext[:n] = lo
    hi_ext[:n] = hi
    for i in range(m):
        A_ext[i, n + i] = 1.0
        if senses[i] == ROW_LE:
            lo_ext[n + i], hi_ext[n + i] = 0.0, np.inf
        elif senses[i] == ROW_GE:
            lo_ext[n + i], hi_ext[n + i] = -np.inf, 0.0
        elif senses[i] == ROW_EQ:
            lo_ext[n + i], hi_ext[n + i] = 0.0, 0.0
        else:
            raise ValueError(f"bad sense code {senses[i]}")
    return A_ext, lo_ext, hi_ext


def _slack_start(m, n, lo_ext):
    basis = np.arange(n, n + m, dtype=np.int64)
    vstat = np.zeros(n + m, dtype=np.int8)
    # structural variables parked at a finite bound (lower first)
    for j in range(n):
        vstat[j] = 0 if np.isfinite(lo_ext[j]) else 1
    vstat[n:] = 2
    return basis, vstat


def solve_lp_arrays(
    A: np.ndarray,
    b: np.ndarray,
    senses: np.ndarray,
    c: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    warm: Optional[LpState] = None,
    max_iter: Optional[int] = None,
) -> LpResult:
    """Solve min c^T x, rows A x {<=,>=,==} b, lo <= x <= hi.

    ``warm`` restarts from a previous basis; the factorized tableau is reused
    when present, otherwise rebuilt. On a numeric breakdown the solve is
    refactorized and retried once before raising.
    """
    m, n = A.shape
    A_ext, lo_ext, hi_ext = build_extended(A, b, senses, lo, hi)
    c_ext = np.zeros(n + m)
    c_ext[:n] = c
    if max_iter is None:
        max_iter = 5000 + 40 * (m + n)

    if warm is not None and warm.basis.shape[0] == m and warm.vstat.shape[0] == n + m:
        basis = warm.basis.copy()
        vstat = warm.vstat.copy()
        T, binvb = warm.T, warm.binvb
    else:
        basis, vstat = _slack_start(m, n, lo_ext)
        T = binvb = None

    b_arr = np.asarray(b, dtype=np.float64)
    attempts = 0
    while True:
        attempts += 1
        if T is None or binvb is None:
            try:
                T, binvb = core.refactorize(A_ext, b_arr, basis)
            except Exception:
                # singular warm basis: fall back to the slack basis
                basis, vstat = _slack_start(m, n, lo_ext)
                T, binvb = core.refactorize(A_ext, b_arr, basis)
        else:
            T = T.copy()
            binvb = binvb.copy()
        status, xB, iters = core.simplex_loop(
            A_ext, b_arr, c_ext, lo_ext, hi_ext, basis, vstat, T, binvb, max_iter
        )
        if status == core.LP_NUMERIC:
            if attempts >= 2:
                raise NumericFailureError("simplex pivot breakdown persisted after refactorization")
            T = binvb = None  # force refactorization and retry once
            continue
        if status == core.LP_ITER_LIMIT:
            raise NumericFailureError(f"simplex iteration limit {max_iter} reached")
        break

    x_full = np.where(vstat == 1, hi_ext, lo_ext)
    x_full[vstat == 2] = 0.0
    x_full[basis] = xB
    x = x_full[:n].copy()
    obj = float(c @ x)

    if status == core.LP_OPTIMAL:
        _check_solution(A, b, senses, lo, hi, x)

    return LpResult(
        status=LP_STATUS_TEXT[status],
        x=x,
        objective=obj,
        state=LpState(basis=basis, vstat=vstat, T=T, binvb=binvb),
        iterations=int(iters),
    )


def _check_solution(A, b, senses, lo, hi, x):
    if np.any(x < lo - _BOUND_TOL) or np.any(x > hi + _BOUND_TOL):
        raise NumericFailureError("LP solution violates variable bounds")
    if A.shape[0] == 0:
        return
    act = A @ x
    scale = 1.0 + np.abs(b) + np.sum(np.abs(A), axis=1)
    resid = np.zeros_like(act)
    le = senses == ROW_LE
    ge = senses == ROW_GE
    eq = senses == ROW_EQ
    resid[le] = act[le] - b[le]
    resid[ge] = b[ge] - act[ge]
    resid[eq] = np.abs(act[eq] - b[eq])
    if np.any(resid > _ROW_TOL * scale):
        raise NumericFailureError("LP solution violates row tolerances")


def dual_certificate(A, b, senses, c, lo, hi, result: LpResult) -> Tuple[np.ndarray, float]:
    """Row multipliers and the dual objective implied by the final basis.

    For an optimal basic solution the dual objective matches the primal one;
    used by the weak-duality spot checks.
    """
    m, n = A.shape
    A_ext, lo_ext, hi_ext = build_extended(A, b, senses, lo, hi)
    c_ext = np.zeros(n + m)
    c_ext[:n] = c
    basis = result.state.basis
    B = A_ext[:, basis]
    y = np.linalg.solve(B.T, c_ext[basis])
    d = c_ext - y @ A_ext
    vstat = result.state.vstat
    dual_obj = float(y @ b)
    for j in range(n + m):
        if vstat[j] == 0 and np.isfinite(lo_ext[j]):
            dual_obj += d[j] * lo_ext[j]
        elif vstat[j] == 1 and np.isfinite(hi_ext[j]):
            dual_obj += d[j] * hi_ext[j]
    return y, dual_obj
