"""Slow, independent reference procedures used by the verification suite.

Everything here is deliberately brute force: exhaustive enumeration over
permutations, subsets, or candidate vertices.  These functions never share
code with the production paths they are used to check.
"""

from __future__ import annotations

import itertools

import numpy as np


def min_permutation_l1(a: np.ndarray, b: np.ndarray) -> float:
    """Exhaustive minimum of sum_i |a_i - b_sigma(i)| over all permutations."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    best = np.inf
    for perm in itertools.permutations(range(b.size)):
        total = float(np.abs(a - b[list(perm)]).sum())
        if total < best:
            best = total
    return best


def min_subset_mass(pmf: np.ndarray, k: int) -> float:
    """Exhaustive minimum of the total mass over all index subsets of size k."""
    pmf = np.asarray(pmf, dtype=np.float64)
    best = np.inf
    for subset in itertools.combinations(range(pmf.size), k):
        total = float(pmf[list(subset)].sum())
        if total < best:
            best = total
    return best


def vertex_enumeration_feasible(
    A: np.ndarray, b: np.ndarray, box: float = 1e4, tol: float = 1e-9
) -> bool:
    """Feasibility of ``Ax <= b`` by enumerating candidate vertices.

    The system is augmented with the box ``|x_i| <= box`` so that a nonempty
    feasible region is guaranteed to have a vertex; every N-subset of rows is
    solved and the solutions are checked against all constraints.  Intended
    for small random systems whose feasibility is not decided within ``tol``
    of the boundary and whose feasible points (if any) lie inside the box.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, n = A.shape
    A_full = np.vstack([A, np.eye(n), -np.eye(n)])
    b_full = np.concatenate([b, np.full(n, box), np.full(n, box)])

    combos = list(itertools.combinations(range(m + 2 * n), n))
    sub_a = np.stack([A_full[list(c)] for c in combos])
    sub_b = np.stack([b_full[list(c)] for c in combos])
    dets = np.linalg.det(sub_a)
    keep = np.abs(dets) > 1e-12
    if not keep.any():
        return False
    solutions = np.linalg.solve(sub_a[keep], sub_b[keep][:, :, None])[:, :, 0]
    residuals = solutions @ A_full.T - b_full
    return bool((residuals.max(axis=1) <= tol).any())


def simplex_grid(n: int, steps: int):
    """Yield every pmf on the n-simplex with entries that are multiples of 1/steps."""

    def rec(prefix, remaining, slots):
        if slots == 1:
            yield prefix + [remaining]
            return
        for v in range(remaining + 1):
            yield from rec(prefix + [v], remaining - v, slots - 1)

    for combo in rec([], steps, n):
        yield np.asarray(combo, dtype=np.float64) / steps
