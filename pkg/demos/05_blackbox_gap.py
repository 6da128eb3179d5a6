"""
How far are the algorithms from the black-box limit?
====================================================

With a known start at distance D, an optimal black-box algorithm needs
only about D*ln(n/D)/ln(n) queries. Random guessing with consistency
filtering shows how few queries suffice at small n.
"""

# %%
import numpy as np

from fixedstart.algorithms import SelfAdjusting, run_ollga
from fixedstart.blackbox import random_guessing_solve, random_instance
from fixedstart.initializers import StartSpec
from fixedstart.samplers import child_seed, make_rng
from fixedstart.theory import blackbox_lower_bound

n, D, runs = 20, 5, 100
queries = []
for r in range(runs):
    rng = make_rng(child_seed(11, r))
    inst, start = random_instance(n, D, rng)
    q, found = random_guessing_solve(inst, start, D, rng)
    assert found == inst.z
    queries.append(q)

ga = [run_ollga(n, StartSpec.exact(D), SelfAdjusting(), None, make_rng(child_seed(12, t))).evaluations
      for t in range(runs)]

# %%
print(f"random guessing: {np.mean(queries):.2f} queries (std {np.std(queries, ddof=1):.2f})")
print(f"self-adjusting GA: {np.mean(ga):.1f} evaluations")
print(f"constant-free lower bound: {blackbox_lower_bound(n, D):.2f}")
