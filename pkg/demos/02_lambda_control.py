"""
How the one-fifth rule steers lambda
====================================

The self-adjusting GA multiplies lambda by A after an iteration without
strict improvement and divides it by A**4 after a strict improvement. On
OneMax this keeps lambda near the fitness-dependent value sqrt(n/d).
"""

# %%
import math

import numpy as np

from fixedstart.algorithms import FitnessDependent, SelfAdjusting, run_ollga, update_lambda_one_fifth
from fixedstart.initializers import StartSpec
from fixedstart.samplers import child_seed, make_rng

# Four failures followed by one success leave lambda unchanged.
lam = 4.0
for _ in range(4):
    lam = update_lambda_one_fifth(lam, False, 1.2, 1e9)
print("after 4 failures:", round(lam, 4), "-> after a success:", update_lambda_one_fifth(lam, True, 1.2, 1e9))

# %%
# A downsampled lambda trace of one run from distance 1024.
n = 2 ** 14
rec = run_ollga(n, StartSpec.exact(1024), SelfAdjusting(), None, make_rng(3), trace=12)
for it, lam in rec.lambda_trace:
    print(f"iteration {it:6d}   lambda {lam:7.2f}")
print("finished after", rec.iterations, "iterations and", rec.evaluations, "evaluations")

# %%
# Self-adjusting vs fitness-dependent vs the log-capped variant.
for name, policy in [("fitness-dependent", FitnessDependent()), ("self-adjusting", SelfAdjusting()),
                     ("capped at 2ln(n+1)", SelfAdjusting(cap="log"))]:
    evals = [run_ollga(n, StartSpec.exact(256), policy, None, make_rng(child_seed(5, t))).evaluations
             for t in range(40)]
    print(f"{name:20s} mean T_F / sqrt(nD) = {np.mean(evals) / math.sqrt(n * 256):6.2f}")
