"""Adversarial instance generators for sample-complexity lower bounds.

Both constructions start from a distribution ``d_yes``, collect its low-mass
elements into a set L, match L into pairs, and move each pair's mass onto a
single endpoint to produce ``d_no``.  The label-invariant variant always
merges into the first endpoint; the general variant picks the surviving
endpoint at random with probability proportional to its mass, which keeps the
single-draw law of every pair identical between ``d_yes`` and the ``d_no``
ensemble.  ``d_no`` loses a ``floor(beta*n)``-sized chunk of its support, so
it cannot be non-concentrated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Distribution, NonConcentrationParams
from .errors import ParameterError, StructureError

CONSERVATION_TOL = 1e-12


@dataclass(frozen=True)
class Pairing:
    """A perfect matching on the low-mass set L."""

    L: tuple
    pairs: tuple

    def __post_init__(self):
        L = tuple(int(i) for i in self.L)
        pairs = tuple((int(x), int(y)) for x, y in self.pairs)
        flat = [i for pair in pairs for i in pair]
        if len(L) != 2 * len(pairs) or len(L) % 2 != 0 or not pairs:
            raise StructureError("pairs must cover L with floor(beta*n) disjoint pairs")
        if len(set(flat)) != len(flat) or set(flat) != set(L):
            raise StructureError("pairs must partition L into disjoint pairs")
        if any(x == y for x, y in pairs):
            raise StructureError("a pair may not repeat an index")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "pairs", pairs)

    @property
    def size(self) -> int:
        return len(self.pairs)

    def pair_ids(self, n: int) -> np.ndarray:
        """Length-n lookup: index -> pair number, or -1 off L."""
        ids = np.full(n, -1, dtype=np.int64)
        for t, (x, y) in enumerate(self.pairs):
            ids[x] = t
            ids[y] = t
        return ids


@dataclass(frozen=True)
class AdversarialPair:
    """A (d_yes, d_no) instance bundled with its pairing and parameters.

    Mass invariants are checked by :func:`verify_adversarial` rather than at
    construction so corrupted bundles can be built as negative controls.
    """

    d_yes: Distribution
    d_no: Distribution
    pairing: Pairing
    params: NonConcentrationParams

    def __post_init__(self):
        if self.d_yes.n != self.d_no.n:
            raise StructureError("d_yes and d_no must share a domain")
        if max(self.pairing.L) >= self.d_yes.n:
            raise StructureError("pairing indices outside the domain")


def build_pairing(d_yes: Distribution, beta: float, rng: np.random.Generator | None = None) -> Pairing:
    """Collect the 2*floor(beta*n) lightest elements and match them into pairs.

    Ties in mass are broken toward the smaller index.  With ``rng`` the
    matching is uniformly random (the label-invariant construction); without
    it, elements adjacent in the (mass, index) order are paired, a fixed
    choice standing in for "arbitrary".
    """
    if not 0.0 < beta < 0.5:
        raise ParameterError("beta must lie in (0, 1/2)")
    k = int(math.floor(beta * d_yes.n))
    if k < 1:
        raise ParameterError(f"beta*n rounds below one pair (beta={beta}, n={d_yes.n})")
    order = np.lexsort((np.arange(d_yes.n), d_yes.pmf))
    L = order[: 2 * k]
    if rng is not None:
        L = rng.permutation(L)
    pairs = tuple((int(L[2 * t]), int(L[2 * t + 1])) for t in range(k))
    return Pairing(L=tuple(int(i) for i in L), pairs=pairs)


def _validate_pairing(d_yes: Distribution, pairing: Pairing) -> None:
    if max(pairing.L) >= d_yes.n or min(pairing.L) < 0:
        raise StructureError("pairing indices outside the domain of d_yes")


def dno_label_invariant(d_yes: Distribution, pairing: Pairing) -> Distribution:
    """Merge each pair's mass into its first endpoint, zeroing the second."""
    _validate_pairing(d_yes, pairing)
    pmf = d_yes.pmf.copy()
    for x, y in pairing.pairs:
        pmf[x] = d_yes.pmf[x] + d_yes.pmf[y]
        pmf[y] = 0.0
    return Distribution(pmf)


def dno_general(d_yes: Distribution, pairing: Pairing, rng: np.random.Generator) -> Distribution:
    """Merge each pair's mass onto one endpoint chosen proportionally to mass.

    Each pair flips an independent coin: the merged mass lands on ``x`` with
    probability ``d_yes(x) / (d_yes(x) + d_yes(y))``.  Pairs with zero total
    mass merge into ``x`` by convention.
    """
    _validate_pairing(d_yes, pairing)
    pmf = d_yes.pmf.copy()
    coins = rng.random(pairing.size)
    for t, (x, y) in enumerate(pairing.pairs):
        total = d_yes.pmf[x] + d_yes.pmf[y]
        if total <= 0.0 or coins[t] < d_yes.pmf[x] / total:
            pmf[x] = total
            pmf[y] = 0.0
        else:
            pmf[x] = 0.0
            pmf[y] = total
    return Distribution(pmf)


@dataclass(frozen=True)
class VerificationReport:
    """Structural checks for an adversarial pair; failures are reported, not thrown."""

    conservation_residuals: tuple
    conservation_ok: bool
    one_zero_ok: bool
    pair_bound: float
    pair_sums: tuple
    pair_bound_ok: bool
    off_l_ok: bool
    support_size: int
    support_limit: int
    support_ok: bool
    failures: tuple

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_adversarial(pair: AdversarialPair) -> VerificationReport:
    """Check conservation, the one-zero-per-pair rule, the per-pair mass bound
    ``2(1-2a)/((1-2b)n)``, off-L agreement, and the support-size deficit."""
    yes = pair.d_yes.pmf
    no = pair.d_no.pmf
    n = pair.d_yes.n
    a, b = pair.params.alpha, pair.params.beta

    residuals = []
    sums = []
    one_zero = True
    for x, y in pair.pairing.pairs:
        merged = no[x] + no[y]
        residuals.append(abs(merged - (yes[x] + yes[y])))
        sums.append(merged)
        if (no[x] == 0.0) == (no[y] == 0.0):
            one_zero = False
    conservation_ok = max(residuals) <= CONSERVATION_TOL

    bound = 2.0 * (1.0 - 2.0 * a) / ((1.0 - 2.0 * b) * n)
    pair_bound_ok = all(s <= bound + CONSERVATION_TOL for s in sums)

    off = np.ones(n, dtype=bool)
    off[list(pair.pairing.L)] = False
    off_l_ok = bool(np.array_equal(yes[off], no[off]))

    support_size = int(np.count_nonzero(no))
    support_limit = n - int(math.floor(b * n))
    support_ok = support_size <= support_limit

    failures = []
    if not conservation_ok:
        failures.append("pair mass not conserved")
    if not one_zero:
        failures.append("some pair does not have exactly one zero endpoint")
    if not pair_bound_ok:
        failures.append("per-pair mass bound violated")
    if not off_l_ok:
        failures.append("d_yes and d_no disagree off L")
    if not support_ok:
        failures.append("support size exceeds (1 - beta)n budget")

    return VerificationReport(
        conservation_residuals=tuple(residuals),
        conservation_ok=conservation_ok,
        one_zero_ok=one_zero,
        pair_bound=bound,
        pair_sums=tuple(sums),
        pair_bound_ok=pair_bound_ok,
        off_l_ok=off_l_ok,
        support_size=support_size,
        support_limit=support_limit,
        support_ok=support_ok,
        failures=tuple(failures),
    )


def make_adversarial_pair(
    d_yes: Distribution,
    params: NonConcentrationParams,
    mode: str = "label-invariant",
    rng: np.random.Generator | None = None,
) -> AdversarialPair:
    """Build a full (d_yes, d_no, pairing) bundle in one call.

    ``label-invariant`` uses a random matching (when ``rng`` is given) and the
    deterministic merge; ``general`` uses the fixed adjacent matching and the
    proportional random merge, which requires ``rng``.
    """
    if mode == "label-invariant":
        pairing = build_pairing(d_yes, params.beta, rng)
        d_no = dno_label_invariant(d_yes, pairing)
    elif mode == "general":
        if rng is None:
            raise ParameterError("the general construction needs an rng for its coins")
        pairing = build_pairing(d_yes, params.beta, None)
        d_no = dno_general(d_yes, pairing, rng)
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    return AdversarialPair(d_yes=d_yes, d_no=d_no, pairing=pairing, params=params)


def relabel(pair: AdversarialPair, rng: np.random.Generator) -> AdversarialPair:
    """Apply one uniformly random relabeling of the domain to the whole bundle."""
    n = pair.d_yes.n
    perm = rng.permutation(n)
    yes = np.empty(n)
    no = np.empty(n)
    yes[perm] = pair.d_yes.pmf
    no[perm] = pair.d_no.pmf
    pairs = tuple((int(perm[x]), int(perm[y])) for x, y in pair.pairing.pairs)
    L = tuple(int(perm[i]) for i in pair.pairing.L)
    return AdversarialPair(
        d_yes=Distribution(yes),
        d_no=Distribution(no),
        pairing=Pairing(L=L, pairs=pairs),
        params=pair.params,
    )


def collision_rate(
    d: Distribution,
    pairing: Pairing,
    m: int,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Fraction of m-sample trials in which two draws land in the same pair.

    A repeated element counts as a collision when it belongs to L.  This is
    the empirical probability of the event whose rarity makes the yes/no
    ensembles indistinguishable at small sample sizes.
    """
    m = int(m)
    trials = int(trials)
    if m < 2:
        raise ParameterError("m must be >= 2")
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    cdf = np.cumsum(d.pmf)
    cdf /= cdf[-1]
    draws = np.searchsorted(cdf, rng.random((trials, m)), side="right")
    ids = pairing.pair_ids(d.n)[draws]
    ids.sort(axis=1)
    same = (ids[:, 1:] == ids[:, :-1]) & (ids[:, 1:] >= 0)
    return float(same.any(axis=1).mean())


def pair_collision_bound(d: Distribution, pairing: Pairing, m: int) -> float:
    """Union bound m^2 * p_max / 2 on the same-pair collision probability."""
    p_max = max(float(d.pmf[x] + d.pmf[y]) for x, y in pairing.pairs)
    return min(1.0, m * m * p_max / 2.0)
