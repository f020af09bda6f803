"""Discrete distributions over a finite domain: data model, distances, sampling.

The domain is always ``{0, 1, ..., n-1}``.  A :class:`Distribution` is an
explicit probability mass function; a :class:`SamplingOracle` produces seeded
i.i.d. draws from one (or from an opaque sampling procedure).  The remaining
functions implement the distance and mass machinery the testers and learners
are built on, plus Chernoff-based sample-size utilities.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Union

import numpy as np

from .errors import DimensionError, ParameterError, StructureError

PMF_SUM_TOL = 1e-9

# Guard against representation noise when a closed-form count lands exactly on
# an integer (e.g. ln(1/kappa) evaluating to 2.0000000000000004).
_CEIL_GUARD = 1e-12


def _checked_ceil(value: float) -> int:
    return int(math.ceil(value * (1.0 - _CEIL_GUARD)))


@dataclass(frozen=True, eq=False)
class Distribution:
    """Explicit pmf over the domain ``{0, ..., n-1}``.

    Invariants enforced at construction: every entry is >= 0, the entries sum
    to 1 within ``PMF_SUM_TOL``, and the domain is nonempty.  Instances are
    immutable (the underlying array is locked), so they are safe to share
    between threads.
    """

    pmf: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pmf, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ParameterError("pmf must be a nonempty 1-d vector")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("pmf entries must be finite")
        if np.any(arr < 0.0):
            raise ParameterError("pmf entries must be non-negative")
        total = float(arr.sum())
        if abs(total - 1.0) > PMF_SUM_TOL:
            raise ParameterError(
                f"pmf must sum to 1 within {PMF_SUM_TOL:g}; got {total!r}"
            )
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "pmf", arr)

    @property
    def n(self) -> int:
        """Domain size."""
        return int(self.pmf.size)

    @classmethod
    def uniform(cls, n: int) -> "Distribution":
        if n < 1:
            raise ParameterError("n must be >= 1")
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, index: int) -> "Distribution":
        if not 0 <= index < n:
            raise ParameterError(f"index {index} outside domain of size {n}")
        pmf = np.zeros(n)
        pmf[index] = 1.0
        return cls(pmf)

    @classmethod
    def uniform_on(cls, indices: Iterable[int], n: int) -> "Distribution":
        """Uniform distribution restricted to ``indices`` inside a size-n domain."""
        idx = np.unique(np.asarray(list(indices), dtype=np.int64))
        if idx.size == 0:
            raise ParameterError("support must be nonempty")
        if idx.min() < 0 or idx.max() >= n:
            raise ParameterError("support indices outside domain")
        pmf = np.zeros(n)
        pmf[idx] = 1.0 / idx.size
        return cls(pmf)

    def mass(self, indices: Iterable[int]) -> float:
        """Total probability mass of a set of indices."""
        idx = np.asarray(list(indices), dtype=np.int64)
        if idx.size == 0:
            return 0.0
        return float(self.pmf[idx].sum())

    def support(self) -> np.ndarray:
        """Indices with strictly positive mass, ascending."""
        return np.flatnonzero(self.pmf > 0.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return bool(np.array_equal(self.pmf, other.pmf))

    def __repr__(self) -> str:
        return f"Distribution(n={self.n})"


@dataclass(frozen=True)
class NonConcentrationParams:
    """Mass threshold ``alpha`` and size fraction ``beta``; 0 < alpha <= beta < 1/2."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= self.beta < 0.5):
            raise ParameterError(
                f"need 0 < alpha <= beta < 1/2; got alpha={self.alpha}, beta={self.beta}"
            )


# An opaque draw procedure: given a generator and a count, returns indices.
DrawProcedure = Callable[[np.random.Generator, int], np.ndarray]

_SEED_MAX = 2**64 - 1

# Chunk size for streaming counts out of opaque sources.
_COUNT_CHUNK = 10_000_000


class SamplingOracle:
    """Seeded source of i.i.d. draws from a distribution.

    ``source`` is either an explicit :class:`Distribution` or an opaque
    callable ``(generator, size) -> indices`` (in which case ``n`` must be
    given).  Rebuilding an oracle with the same seed and source replays the
    identical sample sequence.

    The oracle is stateful (it owns an RNG position): use one oracle per
    thread of execution, and derive independent oracles with :meth:`split`.
    """

    def __init__(self, source: Union[Distribution, DrawProcedure], seed: int, n: int | None = None):
        seed = int(seed)
        if not 0 <= seed <= _SEED_MAX:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        self._seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))
        self.samples_drawn = 0
        if isinstance(source, Distribution):
            self._dist = source
            self._proc = None
            self._n = source.n
            cdf = np.cumsum(source.pmf)
            cdf /= cdf[-1]
            self._cdf = cdf
        elif callable(source):
            if n is None:
                raise ParameterError("opaque sources require an explicit domain size n")
            if n < 1:
                raise ParameterError("n must be >= 1")
            self._dist = None
            self._proc = source
            self._n = int(n)
            self._cdf = None
        else:
            raise ParameterError("source must be a Distribution or a callable")

    @property
    def n(self) -> int:
        return self._n

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def source(self):
        return self._dist if self._dist is not None else self._proc

    def draw(self, m: int) -> np.ndarray:
        """Draw ``m`` i.i.d. indices; deterministic given the seed."""
        m = int(m)
        if m < 0:
            raise ParameterError("m must be >= 0")
        if m == 0:
            return np.empty(0, dtype=np.int64)
        if self._dist is not None:
            u = self._gen.random(m)
            out = np.searchsorted(self._cdf, u, side="right").astype(np.int64)
        else:
            out = np.asarray(self._proc(self._gen, m), dtype=np.int64)
            if out.shape != (m,):
                raise StructureError("draw procedure returned a wrong-shaped batch")
            if out.size and (out.min() < 0 or out.max() >= self._n):
                raise StructureError("draw procedure returned indices outside the domain")
        self.samples_drawn += m
        return out

    def draw_counts(self, m: int) -> np.ndarray:
        """Occurrence counts of ``m`` i.i.d. draws, as a length-n vector.

        For explicit-pmf sources the counts are drawn directly from the
        multinomial law of the batch, which is distributionally identical to
        tallying ``draw(m)`` but costs O(n) instead of O(m); this is what makes
        testers with astronomically large sample budgets runnable.  Opaque
        sources are streamed in chunks.  Counts are attributed to the sample
        budget exactly like literal draws.
        """
        m = int(m)
        if m < 0:
            raise ParameterError("m must be >= 0")
        if m == 0:
            return np.zeros(self._n, dtype=np.int64)
        if self._dist is not None:
            pvals = self._dist.pmf / self._dist.pmf.sum()
            counts = self._gen.multinomial(m, pvals).astype(np.int64)
            self.samples_drawn += m
            return counts
        counts = np.zeros(self._n, dtype=np.int64)
        left = m
        while left > 0:
            chunk = min(left, _COUNT_CHUNK)
            counts += np.bincount(self.draw(chunk), minlength=self._n)
            left -= chunk
        return counts

    def split(self, index: int) -> "SamplingOracle":
        """Independent oracle over the same source, with a derived seed."""
        child_seed = int(np.random.SeedSequence([self._seed, int(index)]).generate_state(1, np.uint64)[0])
        source = self._dist if self._dist is not None else self._proc
        return SamplingOracle(source, child_seed, n=self._n)


def derive_seed(seed: int, index: int) -> int:
    """Stable 64-bit child seed for experiment fan-out."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, np.uint64)[0])


def l1_distance(d1: Distribution, d2: Distribution) -> float:
    """L1 distance between two pmfs on the same domain; lies in [0, 2]."""
    if d1.n != d2.n:
        raise DimensionError(f"domain sizes differ: {d1.n} vs {d2.n}")
    return float(np.abs(d1.pmf - d2.pmf).sum())


def high_set(d: Distribution, kappa: float) -> frozenset:
    """Indices carrying mass at least ``kappa``, for 0 < kappa < 1."""
    if not 0.0 < kappa < 1.0:
        raise ParameterError("kappa must lie in (0, 1)")
    return frozenset(int(i) for i in np.flatnonzero(d.pmf >= kappa))


def top_elements(d: Distribution, t: int) -> list:
    """The ``t`` indices of largest mass, non-increasing; ties go to the smaller index."""
    t = int(t)
    if not 0 <= t <= d.n:
        raise ParameterError(f"t must lie in [0, {d.n}]")
    order = np.lexsort((np.arange(d.n), -d.pmf))
    return [int(i) for i in order[:t]]


def sorted_l1_distance(d1: Distribution, d2: Distribution) -> float:
    """Minimum L1 distance over relabelings of one pmf against the other.

    Equals the coordinate-wise L1 distance after sorting both pmfs in
    non-increasing order, which realizes the minimum over all permutations.
    """
    if d1.n != d2.n:
        raise DimensionError(f"domain sizes differ: {d1.n} vs {d2.n}")
    a = np.sort(d1.pmf)[::-1]
    b = np.sort(d2.pmf)[::-1]
    return float(np.abs(a - b).sum())


def is_non_concentrated(d: Distribution, p: NonConcentrationParams) -> bool:
    """True iff every set of ``floor(beta*n)`` indices carries mass >= alpha.

    The minimizing set of that size is the set of smallest masses, so only the
    sum of the ``floor(beta*n)`` smallest entries is checked.
    """
    k = int(math.floor(p.beta * d.n))
    if k < 1:
        raise ParameterError(f"beta*n rounds to zero (beta={p.beta}, n={d.n})")
    smallest = np.partition(d.pmf, k - 1)[:k]
    return bool(smallest.sum() >= p.alpha)


def sample_size_additive(delta: float, kappa: float) -> int:
    """Least m with exp(-2*(delta*m)^2 / m) <= kappa.

    ``delta`` is a fractional deviation of an empirical mean of m bounded
    variables; the closed form is ceil(ln(1/kappa) / (2*delta^2)).
    """
    if delta <= 0.0:
        raise ParameterError("delta must be positive")
    if not 0.0 < kappa < 1.0:
        raise ParameterError("kappa must lie in (0, 1)")
    return _checked_ceil(-math.log(kappa) / (2.0 * delta * delta))


def multiplicative_chernoff_bound(mu: float, delta: float) -> float:
    """Upper bound on P(|X - mu| >= delta*mu) for a sum of [0,1] variables."""
    if mu < 0 or not 0.0 <= delta <= 1.0:
        raise ParameterError("need mu >= 0 and 0 <= delta <= 1")
    return 2.0 * math.exp(-mu * delta * delta / 3.0)


def additive_chernoff_bound(n: int, deviation: float) -> float:
    """Upper bound on P(X >= E[X] + deviation) for a sum of n [0,1] variables."""
    if n < 1 or deviation <= 0:
        raise ParameterError("need n >= 1 and deviation > 0")
    return math.exp(-2.0 * deviation * deviation / n)


def draw_samples(oracle: SamplingOracle, m: int) -> np.ndarray:
    """``m`` i.i.d. indices from the oracle (deterministic given its seed)."""
    return oracle.draw(m)


def empirical_distribution(samples: np.ndarray, n: int) -> Distribution:
    """Frequency distribution of a nonempty sample multiset over ``{0..n-1}``."""
    samples = np.asarray(samples, dtype=np.int64)
    if samples.size == 0:
        raise ParameterError("samples must be nonempty")
    if samples.min() < 0 or samples.max() >= n:
        raise ParameterError("sample indices outside the domain")
    counts = np.bincount(samples, minlength=n)
    return Distribution(counts / samples.size)


def save_distribution(d: Distribution, path) -> None:
    """Write a distribution file: a JSON object with fields ``n`` and ``pmf``."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"n": d.n, "pmf": [float(x) for x in d.pmf]}, fh)
        fh.write("\n")


def load_distribution(path) -> Distribution:
    """Read a distribution file, rejecting anything violating the invariants."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise StructureError(f"not a valid distribution file: {exc}") from exc
    if not isinstance(doc, dict) or "n" not in doc or "pmf" not in doc:
        raise StructureError("distribution file must carry fields 'n' and 'pmf'")
    n = doc["n"]
    pmf = doc["pmf"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise StructureError("field 'n' must be an integer")
    if not isinstance(pmf, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pmf):
        raise StructureError("field 'pmf' must be an array of numbers")
    if len(pmf) != n:
        raise StructureError(f"pmf length {len(pmf)} does not match n={n}")
    return Distribution(np.asarray(pmf, dtype=np.float64))
