"""Hot numeric kernels: simplex pivoting, dual coordinate ascent, oracle sums.

Every function here is valid pure numpy; under the numba backend the same
source is njit-compiled (see package __init__). Keep this module free of
Python objects, dicts, and closures so both paths stay available.
"""
import numpy as np

from . import jit

# simplex_loop status codes
LP_OPTIMAL = 0
LP_INFEASIBLE = 1
LP_UNBOUNDED = 2
LP_ITER_LIMIT = 3
LP_NUMERIC = 4

_FTOL = 1e-9     # bound feasibility
_DTOL = 1e-9     # reduced-cost optimality
_PIVTOL = 1e-10  # smallest acceptable pivot element
_DEGTOL = 1e-11  # step size below which a pivot counts as degenerate
_BLAND_AFTER = 50


def _refactorize(A, b, basis):
    m = A.shape[0]
    n = A.shape[1]
    B = np.empty((m, m), dtype=np.float64)
    for i in range(m):
        B[:, i] = A[:, basis[i]]
    rhs = np.empty((m, n + 1), dtype=np.float64)
    rhs[:, :n] = A
    rhs[:, n] = b
    sol = np.linalg.solve(B, rhs)
    return sol[:, :n].copy(), sol[:, n].copy()


refactorize = jit(_refactorize)


def _compute_basic_values(T, binvb, lo, hi, basis, vstat):
    ntot = T.shape[1]
    xn = np.zeros(ntot, dtype=np.float64)
    for j in range(ntot):
        if vstat[j] == 1:
            xn[j] = hi[j]
        elif vstat[j] == 0:
            xn[j] = lo[j]
    return binvb - T @ xn


compute_basic_values = jit(_compute_basic_values)


def _simplex_loop(A, b, c, lo, hi, basis, vstat, T, binvb, max_iter):
    """Bounded-variable primal simplex on equality-form data.

    ``A`` already carries the slack identity block; ``basis``/``vstat`` describe
    a starting point (vstat: 0 at lower bound, 1 at upper bound, 2 basic) and
    ``T = B^-1 A``, ``binvb = B^-1 b`` match ``basis``. Infeasible starts are
    handled by a phase-1 pricing on the total bound violation of the basic
    variables. Dantzig pricing with a Bland fallback after a run of degenerate
    pivots. All five state arrays are mutated in place.

    Returns (status, xB, iterations).
    """
    m, ntot = T.shape
    xB = compute_basic_values(T, binvb, lo, hi, basis, vstat)
    if m == 0:
        return LP_OPTIMAL, xB, 0

    degen_run = 0
    bland = False
    it = 0
    while True:
        it += 1
        if it > max_iter:
            return LP_ITER_LIMIT, xB, it

        lob = np.empty(m, dtype=np.float64)
        hib = np.empty(m, dtype=np.float64)
        for i in range(m):
            lob[i] = lo[basis[i]]
            hib[i] = hi[basis[i]]

        above = xB > hib + _FTOL
        below = xB < lob - _FTOL
        n_infeas = int(np.sum(above)) + int(np.sum(below))

        if n_infeas > 0:
            w = above.astype(np.float64) - below.astype(np.float64)
            price = -(w @ T)
        else:
            price = c - (c[basis] @ T)

        movable = (hi - lo) > 0.0
        elig = movable & (((vstat == 0) & (price < -_DTOL)) | ((vstat == 1) & (price > _DTOL)))
        if not np.any(elig):
            if n_infeas > 0:
                return LP_INFEASIBLE, xB, it
            return LP_OPTIMAL, xB, it

        if bland:
            enter = int(np.argmax(elig))
        else:
            score = np.where(elig, np.abs(price), -1.0)
            enter = int(np.argmax(score))

        sigma = 1.0 if vstat[enter] == 0 else -1.0
        tcol = T[:, enter].copy()
        delta = sigma * tcol  # basic values move by -t * delta

        # Blocking bound for each basic row. A variable already outside one of
        # its bounds only blocks when moving back toward feasibility.
        tgt_dec = np.where(above, hib, lob)
        tgt_inc = np.where(below, lob, hib)
        pos = delta > _PIVTOL
        neg = delta < -_PIVTOL
        dsafe = np.where(pos | neg, delta, 1.0)
        blk_pos = pos & ~below & np.isfinite(tgt_dec)
        blk_neg = neg & ~above & np.isfinite(tgt_inc)
        ratios = np.full(m, np.inf)
        rr_dec = np.maximum((xB - tgt_dec) / dsafe, 0.0)
        rr_inc = np.maximum((xB - tgt_inc) / dsafe, 0.0)
        ratios = np.where(blk_pos, rr_dec, ratios)
        ratios = np.where(blk_neg, rr_inc, ratios)

        r_leave = int(np.argmin(ratios))
        t_row = ratios[r_leave]
        if np.isfinite(t_row):
            cand = ratios <= t_row + _DEGTOL
            if bland:
                bidx = np.where(cand, basis, ntot + 1)
                r_leave = int(np.argmin(bidx))
            else:
                stab = np.where(cand, np.abs(tcol), -1.0)
                r_leave = int(np.argmax(stab))
            t_row = max(ratios[r_leave], 0.0)

        flip = hi[enter] - lo[enter]  # may be inf for slacks

        if not np.isfinite(t_row) and not np.isfinite(flip):
            if n_infeas > 0:
                return LP_NUMERIC, xB, it
            return LP_UNBOUNDED, xB, it

        if flip <= t_row:
            xB -= (sigma * flip) * tcol
            vstat[enter] = 1 - vstat[enter]
            if flip <= _DEGTOL:
                degen_run += 1
            else:
                degen_run = 0
                bland = False
            if degen_run >= _BLAND_AFTER:
                bland = True
            continue

        piv = tcol[r_leave]
        if np.abs(piv) < _PIVTOL:
            return LP_NUMERIC, xB, it

        xB -= (sigma * t_row) * tcol
        if vstat[enter] == 0:
            enter_val = lo[enter] + sigma * t_row
        else:
            enter_val = hi[enter] + sigma * t_row

        leave_col = basis[r_leave]
        if delta[r_leave] > 0.0:
            vstat[leave_col] = 1 if above[r_leave] else 0
        else:
            vstat[leave_col] = 0 if below[r_leave] else 1

        prow = T[r_leave] / piv
        pb = binvb[r_leave] / piv
        colv = T[:, enter].copy()
        colv[r_leave] = 0.0
        T -= colv.reshape(m, 1) * prow.reshape(1, ntot)
        binvb -= colv * pb
        T[r_leave] = prow
        binvb[r_leave] = pb
        basis[r_leave] = enter
        vstat[enter] = 2
        xB[r_leave] = enter_val

        if t_row <= _DEGTOL:
            degen_run += 1
        else:
            degen_run = 0
            bland = False
        if degen_run >= _BLAND_AFTER:
            bland = True


simplex_loop = jit(_simplex_loop)


def _qp_dual_ascent(Acuts, bvec, cap, alpha, max_sweeps, tol):
    """Coordinate ascent on: max b^T a - 0.5 ||A^T a||^2, a >= 0, sum(a) <= cap.

    Single-coordinate Newton steps, clipped to the feasible box, plus a
    pairwise redistribution step when the budget constraint is tight (a lone
    coordinate cannot trade mass across the sum(a) = cap face). ``alpha`` is
    the warm start and is mutated. Returns (v, sweeps, last_improve) with
    v = A^T alpha, the primal weight vector.
    """
    mcut, p = Acuts.shape
    v = Acuts.T @ alpha
    total = float(np.sum(alpha))
    sq = np.empty(mcut, dtype=np.float64)
    for i in range(mcut):
        sq[i] = float(Acuts[i] @ Acuts[i])

    last = np.inf
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        improve = 0.0
        for i in range(mcut):
            ai = alpha[i]
            room = cap - (total - ai)
            g = float(bvec[i] - Acuts[i] @ v)
            if sq[i] > 1e-300:
                target = ai + g / sq[i]
            elif g > 0.0:
                target = room
            elif g < 0.0:
                target = 0.0
            else:
                target = ai
            if target < 0.0:
                target = 0.0
            if target > room:
                target = room
            step = target - ai
            if step != 0.0:
                gain = g * step - 0.5 * sq[i] * step * step
                alpha[i] = target
                total += step
                v += step * Acuts[i]
                if gain > improve:
                    improve = gain

        # Pairwise exchange along (e_j - e_i): keeps the total fixed, so it can
        # trade mass across the sum(a) = cap face where lone coordinates stall.
        for i in range(mcut):
            if alpha[i] <= 0.0:
                continue
            for j in range(mcut):
                if j == i:
                    continue
                gi = float(bvec[i] - Acuts[i] @ v)
                gj = float(bvec[j] - Acuts[j] @ v)
                slope = gj - gi
                if slope <= 0.0:
                    continue
                d = Acuts[j] - Acuts[i]
                curv = float(d @ d)
                if curv > 1e-300:
                    step = slope / curv
                else:
                    step = alpha[i]
                if step > alpha[i]:
                    step = alpha[i]
                if step <= 0.0:
                    continue
                gain = slope * step - 0.5 * curv * step * step
                if gain <= 0.0:
                    continue
                alpha[i] -= step
                alpha[j] += step
                v += step * d
                if gain > improve:
                    improve = gain

        last = improve
        if improve < tol:
            break
    return v, sweeps, last


qp_dual_ascent = jit(_qp_dual_ascent)


def _sskp_cost_value_grad(W, z, q, cpen):
    """Mean positive overrun cost and its gradient over the given scenarios.

    W is (n, k): one row per scenario. Returns (value, grad).
    """
    n = W.shape[0]
    load = W @ z - q
    over = load > 0.0
    active = load >= 0.0  # gradient indicator is >= 0 exactly
    value = (cpen / n) * float(np.sum(np.where(over, load, 0.0)))
    grad = (cpen / n) * (W.T @ active.astype(np.float64))
    return value, grad


sskp_cost_value_grad = jit(_sskp_cost_value_grad)


def _sskp_cost_value(W, z, q, cpen):
    n = W.shape[0]
    load = W @ z - q
    return (cpen / n) * float(np.sum(np.maximum(load, 0.0)))


sskp_cost_value = jit(_sskp_cost_value)


def _hinge_value_grad(X, y, theta):
    """Mean hinge loss over rows of X and minimization-oriented subgradient."""
    n = X.shape[0]
    margin = y * (X @ theta)
    act = margin < 1.0
    value = float(np.sum(np.where(act, 1.0 - margin, 0.0))) / n
    cy = np.where(act, y, 0.0)
    grad = -(X.T @ cy) / n
    return value, grad


hinge_value_grad = jit(_hinge_value_grad)


def _hinge_value(X, y, theta):
    n = X.shape[0]
    margin = y * (X @ theta)
    return float(np.sum(np.maximum(1.0 - margin, 0.0))) / n


hinge_value = jit(_hinge_value)


def _sskp_enumerate_graycode(W, r, q, cpen):
    """Exact max of sum(r*z) - mean overrun cost over all 2^k supports.

    Gray-code walk: one scenario-load update per visited support. Exponential
    in k; callers gate on k.
    """
    n, k = W.shape
    load = np.full(n, -q)
    z = np.zeros(k, dtype=np.int64)
    best = 0.0  # z = 0 objective
    best_code = 0
    reward = 0.0
    code = 0
    for step in range(1, 2 ** k):
        # bit that flips at this Gray step
        bit = 0
        s = step
        while s % 2 == 0:
            s //= 2
            bit += 1
        if z[bit] == 0:
            z[bit] = 1
            reward += r[bit]
            load += W[:, bit]
        else:
            z[bit] = 0
            reward -= r[bit]
            load -= W[:, bit]
        code ^= 1 << bit
        cost = (cpen / n) * float(np.sum(np.maximum(load, 0.0)))
        obj = reward - cost
        if obj > best:
            best = obj
            best_code = code
    zbest = np.zeros(k, dtype=np.int64)
    for i in range(k):
        if (best_code >> i) & 1:
            zbest[i] = 1
    return best, zbest


sskp_enumerate_graycode = jit(_sskp_enumerate_graycode)
