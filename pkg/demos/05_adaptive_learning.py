"""Learning a concentrated distribution without knowing its support size.

Run with:  python3 demos/05_adaptive_learning.py
"""

import numpy as np

from disttest import (
    Distribution,
    SamplingOracle,
    l1_distance,
    learn_adaptive,
    learn_known_support,
)

N = 100_000
S = 32
truth = Distribution.uniform_on(range(S), N)
print(f"hidden distribution: uniform on {S} of {N:,} elements\n")

# If the support size is known, a fixed budget of O(s / delta^2) draws is
# already enough for an L1-accurate empirical pmf.
oracle = SamplingOracle(truth, seed=1)
known = learn_known_support(oracle, s=S, delta=0.5)
print(f"known-support learner: {oracle.samples_drawn} draws, "
      f"l1 error {l1_distance(known, truth):.3f}")

# The adaptive learner doubles a guess 1, 2, 4, ... and lets a tolerant
# identity test decide when the current empirical candidate is close enough.
oracle = SamplingOracle(truth, seed=2)
result = learn_adaptive(oracle, eta=0.0, delta=0.5, n=N, c_test=0.25)
print(f"\nadaptive learner: outcome = {result.outcome}, "
      f"final guess = {result.final_guess}, total draws = {result.total_samples}")
print(f"l1 error: {l1_distance(result.distribution, truth):.3f}")
print("\niteration log (guess, learn draws, test draws, accepted):")
for rec in result.iterations:
    print(f"  s = {rec.guess:3d}   {rec.learn_draws:6d} + {rec.test_draws:6d}   {rec.accepted}")

print(f"\nNote the geometric ramp: the draw total is governed by the true")
print(f"support size ({S}), not by n = {N:,}, and |S| was never revealed.")
