"""Tour of the core data model: pmfs, distances, heavy elements, spread-out mass.

Run with:  python3 demos/01_distributions_and_distances.py
"""

import numpy as np

from disttest import (
    Distribution,
    NonConcentrationParams,
    SamplingOracle,
    empirical_distribution,
    high_set,
    is_non_concentrated,
    l1_distance,
    sample_size_additive,
    sorted_l1_distance,
    top_elements,
)

# A distribution is an explicit pmf over {0, ..., n-1}.
skewed = Distribution(np.array([0.4, 0.3, 0.15, 0.1, 0.05]))
uniform = Distribution.uniform(5)
print(f"skewed pmf:  {skewed.pmf}")
print(f"uniform pmf: {uniform.pmf}")

# L1 distance is the workhorse metric; it lives in [0, 2].
print(f"\nl1(skewed, uniform) = {l1_distance(skewed, uniform):.4f}")

# The label-invariant version sorts both pmfs first: it is the distance
# minimized over all relabelings of one of the two domains.
shuffled = Distribution(skewed.pmf[[3, 0, 4, 1, 2]])
print(f"l1(skewed, shuffled)        = {l1_distance(skewed, shuffled):.4f}")
print(f"sorted_l1(skewed, shuffled) = {sorted_l1_distance(skewed, shuffled):.4f}  (zero: same shape)")

# Heavy elements and the top-t list.
print(f"\nelements with mass >= 0.15: {sorted(high_set(skewed, 0.15))}")
print(f"top 3 elements by mass:     {top_elements(skewed, 3)}")

# Non-concentration: every floor(beta*n)-sized set must carry alpha mass.
params = NonConcentrationParams(alpha=0.05, beta=0.4)
print(f"\nskewed is (0.05, 0.4)-non-concentrated:  {is_non_concentrated(skewed, params)}")
spike = Distribution.point_mass(5, 0)
print(f"point mass is (0.05, 0.4)-non-concentrated: {is_non_concentrated(spike, params)}")

# Seeded sampling is fully reproducible, and empirical distributions converge.
oracle = SamplingOracle(skewed, seed=2024)
m = sample_size_additive(delta=0.02, kappa=0.01)
print(f"\nadditive-Chernoff budget for ±2% at 99% confidence: m = {m}")
emp = empirical_distribution(oracle.draw(m * 10), skewed.n)
print(f"empirical pmf from {m * 10} draws: {np.round(emp.pmf, 3)}")
print(f"l1 to the truth: {l1_distance(emp, skewed):.4f}")
