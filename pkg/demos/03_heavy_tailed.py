"""
Heavy-tailed lambda
===================

Instead of adapting lambda, the fast GA draws it every iteration from a
power law Pr[lambda = i] ~ i**-beta on [1..u]. The runtime depends on beta
and u in the way predicted by the constant-free table in ``theory``.
"""

# %%
import math

import numpy as np

from fixedstart.algorithms import HeavyTailed, run_ollga
from fixedstart.initializers import StartSpec
from fixedstart.samplers import child_seed, make_rng, power_law, power_law_pmf, sample_power_law
from fixedstart.theory import predicted_runtime

dist = power_law(2.0, 3)
print("pmf on [1..3] with beta=2:", [round(power_law_pmf(dist, i), 4) for i in (1, 2, 3)])
draws = sample_power_law(dist, make_rng(0), size=100_000)
print("empirical frequencies:     ", [round(float(np.mean(draws == i)), 4) for i in (1, 2, 3)])

# %%
# Small distance, u = sqrt(n): larger beta costs more.
n, D = 2 ** 14, 16
for beta in (2.1, 2.5, 2.9):
    policy = HeavyTailed(beta, "sqrt-n")
    evals = [run_ollga(n, StartSpec.exact(D), policy, None, make_rng(child_seed(9, t))).evaluations
             for t in range(60)]
    pred = predicted_runtime(policy, n, D)
    print(f"beta {beta}: mean T_F {np.mean(evals):9.0f}   constant-free prediction {pred.value:9.0f} ({pred.expression_id})")

# %%
# The recommended setting when D is unknown: beta = 2, u = sqrt(n).
print(predicted_runtime(HeavyTailed(2.0, "sqrt-n"), n, D))
