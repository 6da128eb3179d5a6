"""
Starting close to the optimum
=============================

Each algorithm is started at Hamming distance D from the all-ones string
and we count fitness evaluations until the optimum is found. Dividing by
sqrt(n*D) makes runs at different n and D comparable.
"""

# %%
# Two kinds of start: exactly D zero-bits, or every bit zero with
# probability q (expected distance n*q).
import math

import numpy as np

from fixedstart.algorithms import SelfAdjusting, run_ollga, run_one_plus_one_ea, run_rls
from fixedstart.core import distance_to_optimum
from fixedstart.initializers import StartSpec, start_spec_for_figure
from fixedstart.samplers import child_seed, make_rng

n = 4096
rng = make_rng(1)
print("exact D=64     ->", distance_to_optimum(StartSpec.exact(64).draw(n, rng)))
print("bernoulli 1/64 ->", [distance_to_optimum(start_spec_for_figure("sqrt", n).draw(n, rng)) for _ in range(5)])

# %%
# Run the three algorithms from the same kind of start, 50 trials each.
D, trials = 64, 50
runners = {
    "(1+(l,l)) GA, self-adjusting": lambda r: run_ollga(n, StartSpec.exact(D), SelfAdjusting(), None, r),
    "(1+1) EA": lambda r: run_one_plus_one_ea(n, StartSpec.exact(D), None, r),
    "RLS": lambda r: run_rls(n, StartSpec.exact(D), None, r),
}
for name, run in runners.items():
    evals = np.array([run(make_rng(child_seed(7, t))).evaluations for t in range(trials)])
    print(f"{name:32s} mean T_F {evals.mean():9.1f}   / sqrt(nD) = {evals.mean() / math.sqrt(n * D):6.2f}")

# %%
# RLS has a closed form: each missing bit is found with probability d/n,
# so the expectation is n * H_D.
print("n * H_D =", round(n * sum(1 / d for d in range(1, D + 1)), 1))
