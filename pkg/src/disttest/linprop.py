"""Linear properties of distributions and the tester's feasibility question.

A linear property is the projection of a polyhedron ``Ax <= b`` onto its first
``n`` coordinates, which are read as a pmf.  Given the tester's high-mass
estimate, :func:`build_feasibility_lp` assembles the slack-linearized system
whose feasibility answers "is there a member of the property close to the
surrogate distribution with its heavy elements inside H?", and
:func:`lp_feasible` decides it with a phase-1 feasibility solve.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import Distribution
from .errors import ParameterError, StructureError
from .simplex import FEAS_TOL, extract_bounds, solve_feasibility

EPS_STRICT = 1e-12

# Auxiliary dimensions are capped at this multiple of the pmf dimension to
# keep feasibility solves tractable; override per property when needed.
DEFAULT_DIM_CAP = 10


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """The solution set of ``A x <= b`` (rows listed in ``strict_rows`` are ``<``)."""

    A: np.ndarray
    b: np.ndarray
    strict_rows: frozenset = frozenset()

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=np.float64))
        b = np.asarray(self.b, dtype=np.float64).ravel()
        if A.shape[0] != b.size:
            raise StructureError(f"A has {A.shape[0]} rows but b has {b.size} entries")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise StructureError("polyhedron entries must be finite")
        strict = frozenset(int(i) for i in self.strict_rows)
        if any(i < 0 or i >= A.shape[0] for i in strict):
            raise StructureError("strict row index outside [0, M)")
        A = A.copy()
        b = b.copy()
        A.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "strict_rows", strict)

    @property
    def M(self) -> int:
        return int(self.A.shape[0])

    @property
    def N(self) -> int:
        return int(self.A.shape[1])

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.A.tobytes())
        h.update(self.b.tobytes())
        h.update(repr(sorted(self.strict_rows)).encode())
        return h.hexdigest()[:16]

    def __repr__(self) -> str:
        return f"Polyhedron(M={self.M}, N={self.N}, strict={len(self.strict_rows)})"


class LinearProperty:
    """A distribution property: the first-n-coordinate projection of a polyhedron.

    The two inequality rows encoding ``sum_{i<n} z_i = 1`` are appended at
    construction, since members of a property are distributions.
    Non-negativity of the pmf coordinates is the author's responsibility
    (standard property encodings, like the approximate-uniformity system,
    already carry it).
    """

    def __init__(self, poly: Polyhedron, n: int, dim_cap: int = DEFAULT_DIM_CAP):
        n = int(n)
        if n < 1:
            raise ParameterError("n must be >= 1")
        if n > poly.N:
            raise ParameterError(f"projection dimension {n} exceeds variable count {poly.N}")
        if poly.N > dim_cap * n:
            raise ParameterError(
                f"polyhedron has {poly.N} variables; cap is {dim_cap}*n = {dim_cap * n} "
                "(raise dim_cap to override)"
            )
        ones = np.zeros((2, poly.N))
        ones[0, :n] = 1.0
        ones[1, :n] = -1.0
        A = np.vstack([poly.A, ones])
        b = np.concatenate([poly.b, [1.0, -1.0]])
        self.poly = Polyhedron(A, b, poly.strict_rows)
        self.n = n

    def contains(self, d: Distribution) -> bool:
        """Whether an explicit pmf belongs to the property (pins z_{1..n} = pmf)."""
        if d.n != self.n:
            raise ParameterError(f"pmf has {d.n} entries; property projects to {self.n}")
        pin = np.zeros((2 * self.n, self.poly.N))
        pin[: self.n, : self.n] = np.eye(self.n)
        pin[self.n :, : self.n] = -np.eye(self.n)
        rhs = np.concatenate([d.pmf, -d.pmf])
        merged = Polyhedron(
            np.vstack([self.poly.A, pin]),
            np.concatenate([self.poly.b, rhs]),
            self.poly.strict_rows,
        )
        return lp_feasible(merged)


@dataclass(frozen=True)
class FeasibilityInstance:
    """The assembled slack-variable system for one tester step-5 question."""

    poly: Polyhedron
    var_count: int


def uniformity_polyhedron(n: int, eps: float) -> LinearProperty:
    """The property of being within L1 distance ``eps`` of uniform over [n].

    Variables are ``z_1..z_n`` (the pmf) and ``z_{n+1}..z_{2n}`` (slacks
    bounding each ``|z_i - 1/n|``); the slack total is capped at ``eps``.
    """
    n = int(n)
    if n < 1:
        raise ParameterError("n must be >= 1")
    if not 0.0 <= eps <= 2.0:
        raise ParameterError("eps must lie in [0, 2]")
    N = 2 * n
    rows = []
    rhs = []

    budget = np.zeros(N)
    budget[n:] = 1.0
    rows.append(budget)
    rhs.append(float(eps))

    for i in range(N):
        row = np.zeros(N)
        row[i] = -1.0
        rows.append(row)
        rhs.append(0.0)

    target = 1.0 / n
    for i in range(n):
        up = np.zeros(N)
        up[i] = 1.0
        up[n + i] = -1.0
        rows.append(up)
        rhs.append(target)
        dn = np.zeros(N)
        dn[i] = -1.0
        dn[n + i] = -1.0
        rows.append(dn)
        rhs.append(-target)

    return LinearProperty(Polyhedron(np.asarray(rows), np.asarray(rhs)), n)


def build_feasibility_lp(
    prop: LinearProperty,
    H: Iterable[int],
    d_tilde: Distribution,
    q: int,
    bound: float,
) -> FeasibilityInstance:
    """Assemble the step-5 system over the property variables plus slacks.

    Variables: the property's N coordinates, one slack per member of H
    (bounding ``|z_i - d_tilde(i)|``), and one tail slack bounding the
    aggregate deviation off H.  Off-H pmf coordinates are forced below
    ``1/q^2``; that strict constraint is encoded closed with an ``EPS_STRICT``
    shave.
    """
    n = prop.n
    if d_tilde.n != n:
        raise ParameterError(f"d_tilde has {d_tilde.n} entries; property projects to {n}")
    if bound < 0:
        raise ParameterError("bound must be >= 0")
    q = int(q)
    if q < 1:
        raise ParameterError("q must be >= 1")
    Hs = sorted(int(i) for i in set(H))
    if Hs and (Hs[0] < 0 or Hs[-1] >= n):
        raise IndexError(f"H contains indices outside [0, {n})")
    h = len(Hs)
    N = prop.poly.N
    V = N + h + 1
    tail_col = N + h
    comp = np.setdiff1d(np.arange(n), np.asarray(Hs, dtype=np.int64))
    tail_ref = float(d_tilde.pmf[comp].sum()) if comp.size else 0.0

    rows = []
    rhs = []

    base = np.zeros((prop.poly.M, V))
    base[:, :N] = prop.poly.A
    rows.extend(base)
    rhs.extend(prop.poly.b.tolist())

    budget = np.zeros(V)
    budget[N : N + h + 1] = 1.0
    rows.append(budget)
    rhs.append(float(bound))

    for k in range(h + 1):
        row = np.zeros(V)
        row[N + k] = -1.0
        rows.append(row)
        rhs.append(0.0)

    for k, i in enumerate(Hs):
        ref = float(d_tilde.pmf[i])
        up = np.zeros(V)
        up[i] = 1.0
        up[N + k] = -1.0
        rows.append(up)
        rhs.append(ref)
        dn = np.zeros(V)
        dn[i] = -1.0
        dn[N + k] = -1.0
        rows.append(dn)
        rhs.append(-ref)

    tail_up = np.zeros(V)
    tail_up[comp] = 1.0
    tail_up[tail_col] = -1.0
    rows.append(tail_up)
    rhs.append(tail_ref)
    tail_dn = np.zeros(V)
    tail_dn[comp] = -1.0
    tail_dn[tail_col] = -1.0
    rows.append(tail_dn)
    rhs.append(-tail_ref)

    cap = 1.0 / (q * q) - EPS_STRICT
    for j in comp:
        row = np.zeros(V)
        row[j] = 1.0
        rows.append(row)
        rhs.append(cap)

    poly = Polyhedron(np.asarray(rows), np.asarray(rhs))
    return FeasibilityInstance(poly=poly, var_count=V)


def lp_feasible(inst, tol: float = FEAS_TOL, max_iter: int = 10**6) -> bool:
    """True iff the system has a point satisfying every row within ``tol``.

    Decided by a phase-1 artificial-variable method: minimize the total
    constraint violation and test whether the optimum is <= ``tol``.  Strict
    rows are relaxed by ``EPS_STRICT`` before solving.
    """
    return feasibility_report(inst, tol=tol, max_iter=max_iter).feasible


def feasibility_report(inst, tol: float = FEAS_TOL, max_iter: int = 10**6):
    """Like :func:`lp_feasible` but returns the full solver result."""
    poly = inst.poly if isinstance(inst, FeasibilityInstance) else inst
    if not isinstance(poly, Polyhedron):
        raise ParameterError("expected a FeasibilityInstance or Polyhedron")
    b = poly.b.copy()
    if poly.strict_rows:
        b[list(poly.strict_rows)] -= EPS_STRICT
    A2, b2, lower, upper, consistent = extract_bounds(poly.A, b, tol=tol)
    if not consistent:
        # Contradictory singleton rows: solve the raw system so the reported
        # violation is still the honest phase-1 optimum.
        return solve_feasibility(poly.A, b, tol=tol, max_iter=max_iter, digest=poly.digest())
    return solve_feasibility(
        A2, b2, lower=lower, upper=upper, tol=tol, max_iter=max_iter, digest=poly.digest()
    )


class LinearPropertyOracle:
    """Step-5 oracle for a linear property: assemble the system and decide it.

    Instances are deterministic for fixed inputs and safe for concurrent
    read-only use.
    """

    def __init__(self, prop: LinearProperty, tol: float = FEAS_TOL, max_iter: int = 10**6):
        self.prop = prop
        self.tol = tol
        self.max_iter = max_iter

    def __call__(self, H, d_tilde: Distribution, q: int, bound: float) -> bool:
        inst = build_feasibility_lp(self.prop, H, d_tilde, q, bound)
        return lp_feasible(inst, tol=self.tol, max_iter=self.max_iter)


def linear_property_oracle(prop: LinearProperty) -> LinearPropertyOracle:
    """Property oracle answering step-5 feasibility via the LP route."""
    return LinearPropertyOracle(prop)


def permute_columns(poly: Polyhedron, perm) -> Polyhedron:
    """Polyhedron over relabeled variables ``w_k = z_perm[k]``."""
    perm = np.asarray(perm, dtype=np.int64)
    if sorted(perm.tolist()) != list(range(poly.N)):
        raise ParameterError("perm must be a permutation of range(N)")
    return Polyhedron(poly.A[:, perm], poly.b, poly.strict_rows)


def save_polyhedron(poly: Polyhedron, path) -> None:
    """Write a polyhedron file: JSON with M, N, row-major A, b, strict_rows."""
    doc = {
        "M": poly.M,
        "N": poly.N,
        "A": [float(x) for x in poly.A.ravel()],
        "b": [float(x) for x in poly.b],
        "strict_rows": sorted(poly.strict_rows),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_polyhedron(path) -> Polyhedron:
    """Read a polyhedron file written by :func:`save_polyhedron`."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise StructureError(f"not a valid polyhedron file: {exc}") from exc
    for key in ("M", "N", "A", "b"):
        if not isinstance(doc, dict) or key not in doc:
            raise StructureError(f"polyhedron file must carry field '{key}'")
    M, N = doc["M"], doc["N"]
    if not isinstance(M, int) or not isinstance(N, int) or M < 0 or N < 1:
        raise StructureError("fields 'M' and 'N' must be non-negative integers")
    flat = doc["A"]
    if not isinstance(flat, list) or len(flat) != M * N:
        raise StructureError(f"'A' must hold M*N = {M * N} numbers in row-major order")
    b = doc["b"]
    if not isinstance(b, list) or len(b) != M:
        raise StructureError(f"'b' must hold M = {M} numbers")
    strict = doc.get("strict_rows", [])
    if not isinstance(strict, list) or not all(isinstance(i, int) for i in strict):
        raise StructureError("'strict_rows' must be a list of row indices")
    A = np.asarray(flat, dtype=np.float64).reshape(M, N)
    return Polyhedron(A, np.asarray(b, dtype=np.float64), frozenset(strict))
