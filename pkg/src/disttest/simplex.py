"""Phase-1 simplex feasibility for systems ``Ax <= b`` with variable bounds.

The decision procedure is the classic artificial-variable method: start from
the slack basis, give every violated row an artificial variable equal to its
violation, and minimize the total artificial mass.  The system is feasible
exactly when that minimum is (numerically) zero.

Pivoting uses Dantzig pricing for speed and switches to Bland's rule when the
objective stalls, which guarantees termination on degenerate instances.
Singleton rows should be folded into variable bounds with
:func:`extract_bounds` first; the solver handles general lower/upper bounds,
including free variables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError

FEAS_TOL = 1e-9

_RTOL = 1e-10       # reduced-cost threshold for entering columns
_PTOL = 1e-10       # pivot magnitude threshold
_STALL_LIMIT = 64   # iterations without progress before switching to Bland
_REFRESH_EVERY = 128


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    violation: float
    x: np.ndarray | None
    iterations: int


def extract_bounds(A: np.ndarray, b: np.ndarray, tol: float = FEAS_TOL):
    """Fold singleton rows of ``Ax <= b`` into per-variable bounds.

    Returns ``(A2, b2, lower, upper, consistent)`` where ``A2 x <= b2`` holds
    the remaining multi-variable rows and ``consistent`` is False when the
    folded bounds (or a constant row) are already contradictory.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, n = A.shape
    lower = np.full(n, -np.inf)
    upper = np.full(n, np.inf)
    keep = []
    consistent = True
    for i in range(m):
        nz = np.flatnonzero(A[i] != 0.0)
        if nz.size == 0:
            if b[i] < -tol:
                consistent = False
        elif nz.size == 1:
            j = int(nz[0])
            a = A[i, j]
            if a > 0:
                upper[j] = min(upper[j], b[i] / a)
            else:
                lower[j] = max(lower[j], b[i] / a)
        else:
            keep.append(i)
    gap = lower - upper
    if np.any(gap > tol):
        consistent = False
    else:
        # Bounds that cross by less than the tolerance pin the variable.
        pinched = gap > 0
        upper[pinched] = lower[pinched]
    return A[keep], b[keep], lower, upper, consistent


def _initial_point(lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    x = np.zeros(lower.size)
    below = lower > 0
    above = upper < 0
    x[below] = lower[below]
    x[above] = upper[above]
    return x


def solve_feasibility(
    A: np.ndarray,
    b: np.ndarray,
    lower: np.ndarray | None = None,
    upper: np.ndarray | None = None,
    tol: float = FEAS_TOL,
    max_iter: int = 10**6,
    digest: str = "",
) -> FeasibilityResult:
    """Decide whether ``{x : Ax <= b, lower <= x <= upper}`` is nonempty.

    ``violation`` in the result is the phase-1 optimum: the least achievable
    total constraint violation.  Feasible means ``violation <= tol``.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, n = A.shape
    if lower is None:
        lower = np.full(n, -np.inf)
    if upper is None:
        upper = np.full(n, np.inf)
    lower = np.asarray(lower, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    if np.any(lower > upper):
        return FeasibilityResult(False, float(np.max(lower - upper)), None, 0)

    x0 = _initial_point(lower, upper)
    beta0 = b - A @ x0
    bad = np.flatnonzero(beta0 < 0.0)
    if m == 0 or bad.size == 0:
        return FeasibilityResult(True, 0.0, x0, 0)

    k = bad.size
    ncols = n + m + k
    tab = np.zeros((m, ncols))
    tab[:, :n] = A
    tab[np.arange(m), n + np.arange(m)] = 1.0
    rhs = b.astype(np.float64).copy()
    tab[bad] *= -1.0
    rhs[bad] *= -1.0
    art_cols = n + m + np.arange(k)
    tab[bad, art_cols] = 1.0

    lower_all = np.concatenate([lower, np.zeros(m + k)])
    upper_all = np.concatenate([upper, np.full(m + k, np.inf)])
    is_art = np.zeros(ncols, dtype=bool)
    is_art[n + m :] = True
    frozen = np.zeros(ncols, dtype=bool)

    vals = np.zeros(ncols)
    vals[:n] = x0
    vals[n : n + m] = np.maximum(beta0, 0.0)
    vals[n + np.asarray(bad)] = 0.0
    vals[art_cols] = -beta0[bad]

    basis = (n + np.arange(m)).astype(np.int64)
    basis[bad] = art_cols
    in_basis = np.zeros(ncols, dtype=bool)
    in_basis[basis] = True
    beta = vals[basis].copy()

    cost = is_art.astype(np.float64)

    def refresh_nonbasic():
        nz = np.flatnonzero((~in_basis) & (vals != 0.0))
        return rhs - tab[:, nz] @ vals[nz] if nz.size else rhs.copy()

    def refresh_cost_row():
        rows = np.flatnonzero(is_art[basis])
        return cost - tab[rows].sum(axis=0) if rows.size else cost.copy()

    r = refresh_cost_row()
    z = float(beta[is_art[basis]].sum())
    best_z = z
    stall = 0
    bland = False
    iters = 0

    while True:
        if z <= tol:
            beta = refresh_nonbasic()
            z = float(beta[is_art[basis]].sum())
            if z <= tol:
                break

        movable_up = (~in_basis) & (~frozen) & (vals < upper_all) & (r < -_RTOL)
        movable_dn = (~in_basis) & (~frozen) & (vals > lower_all) & (r > _RTOL)
        candidates = movable_up | movable_dn
        if not candidates.any():
            beta = refresh_nonbasic()
            z = float(beta[is_art[basis]].sum())
            break

        idx = np.flatnonzero(candidates)
        j = int(idx[0]) if bland else int(idx[np.argmax(np.abs(r[idx]))])
        d = 1.0 if movable_up[j] else -1.0

        y = tab[:, j]
        rate = d * y
        theta = upper_all[j] - vals[j] if d > 0 else vals[j] - lower_all[j]
        blocker = -1  # -1: own bound, else blocking row
        hit_upper = False

        lo_rows = np.flatnonzero((rate > _PTOL) & np.isfinite(lower_all[basis]))
        if lo_rows.size:
            th = (beta[lo_rows] - lower_all[basis[lo_rows]]) / rate[lo_rows]
            i_rel = int(np.argmin(th))
            if th[i_rel] < theta:
                theta = th[i_rel]
                blocker = int(lo_rows[i_rel])
                hit_upper = False
        up_rows = np.flatnonzero((rate < -_PTOL) & np.isfinite(upper_all[basis]))
        if up_rows.size:
            th = (upper_all[basis[up_rows]] - beta[up_rows]) / (-rate[up_rows])
            i_rel = int(np.argmin(th))
            if th[i_rel] < theta:
                theta = th[i_rel]
                blocker = int(up_rows[i_rel])
                hit_upper = True

        if not np.isfinite(theta):
            raise SolverError("phase-1 descent direction is unblocked", digest)
        theta = max(theta, 0.0)

        if blocker >= 0:
            tie = np.flatnonzero(
                (rate > _PTOL)
                & np.isfinite(lower_all[basis])
                & (beta - lower_all[basis] <= theta * rate + 1e-12)
            )
            tie_up = np.flatnonzero(
                (rate < -_PTOL)
                & np.isfinite(upper_all[basis])
                & (upper_all[basis] - beta <= -theta * rate + 1e-12)
            )
            if bland:
                # Bland: leave the tied basic variable of smallest index.
                best_key = int(basis[blocker])
                for cand in tie:
                    if int(basis[cand]) < best_key:
                        blocker, best_key, hit_upper = int(cand), int(basis[cand]), False
                for cand in tie_up:
                    if int(basis[cand]) < best_key:
                        blocker, best_key, hit_upper = int(cand), int(basis[cand]), True
            else:
                # Among (near-)ties prefer the largest pivot magnitude.
                best_mag = abs(rate[blocker])
                for cand in tie:
                    if abs(rate[cand]) > best_mag:
                        blocker, best_mag, hit_upper = int(cand), abs(rate[cand]), False
                for cand in tie_up:
                    if abs(rate[cand]) > best_mag:
                        blocker, best_mag, hit_upper = int(cand), abs(rate[cand]), True

        delta = d * theta
        r_j = r[j]
        if blocker < 0:
            vals[j] += delta
            beta -= theta * rate
            z += r_j * delta
        else:
            leave = int(basis[blocker])
            piv = tab[blocker, j]
            beta -= theta * rate
            entering_val = vals[j] + delta
            col = tab[:, j].copy()
            tab[blocker] /= piv
            rhs[blocker] /= piv
            col[blocker] = 0.0
            nzr = np.flatnonzero(col)
            if nzr.size:
                tab[nzr] -= np.outer(col[nzr], tab[blocker])
                rhs[nzr] -= col[nzr] * rhs[blocker]
            r = r - r_j * tab[blocker]
            basis[blocker] = j
            in_basis[j] = True
            in_basis[leave] = False
            vals[leave] = upper_all[leave] if hit_upper else lower_all[leave]
            beta[blocker] = entering_val
            if is_art[leave]:
                frozen[leave] = True
            z += r_j * delta

        iters += 1
        if z < best_z - 1e-13:
            best_z = z
            stall = 0
        else:
            stall += 1
            if stall >= _STALL_LIMIT:
                bland = True
        if iters % _REFRESH_EVERY == 0:
            beta = refresh_nonbasic()
            r = refresh_cost_row()
            z = float(beta[is_art[basis]].sum())
        if iters > max_iter:
            raise SolverError(f"iteration cap {max_iter} exceeded", digest)

    x = vals[:n].copy()
    struct_rows = np.flatnonzero(basis < n)
    x[basis[struct_rows]] = beta[struct_rows]
    feasible = z <= tol
    if feasible:
        true_violation = float(np.clip(A @ x - b, 0.0, None).sum())
        true_violation += float(np.clip(lower - x, 0.0, None).sum())
        true_violation += float(np.clip(x - upper, 0.0, None).sum())
        if true_violation > max(100 * tol, 1e-6):
            raise SolverError("feasible vertex fails residual check", digest)
    return FeasibilityResult(bool(feasible), float(max(z, 0.0)), x if feasible else None, iters)
