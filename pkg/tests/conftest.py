import numpy as np
import pytest

from disttest.core import Distribution


def random_pmf(rng: np.random.Generator, n: int) -> np.ndarray:
    """A generic positive pmf (normalized exponentials)."""
    raw = rng.exponential(size=n)
    return raw / raw.sum()


def random_distribution(rng: np.random.Generator, n: int) -> Distribution:
    return Distribution(random_pmf(rng, n))


def mixture_distribution(rng: np.random.Generator, n: int, theta: float = 0.5) -> Distribution:
    """theta * uniform + (1 - theta) * random; non-concentrated for modest alpha."""
    pmf = theta / n + (1.0 - theta) * random_pmf(rng, n)
    return Distribution(pmf / pmf.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
