"""
A desk-scale slice of the sqrt(n) experiment series
===================================================

The ``fig1`` preset runs every algorithm of the first series from a
Bernoulli start with expected distance sqrt(n). Here it is cut down to
n <= 4096 and 20 trials, written to CSV, and summarised.
"""

# %%
import dataclasses
import tempfile
from pathlib import Path

from fixedstart.harness import emit_csv, fit_scaling_exponent, preset_config, read_csv, run_experiment

cfg = dataclasses.replace(preset_config("fig1", max_n=4096), trials=20, master_seed=2024)
print(len(cfg.algorithms), "algorithms x", len(cfg.n_values), "sizes =", len(cfg.cells()), "cells")

# %%
stats = run_experiment(cfg, workers=1)
out = Path(tempfile.mkdtemp()) / "sqrt_series.csv"
emit_csv(stats, str(out))
rows = read_csv(str(out))
for r in rows:
    if r["n"] == "4096":
        print(f"{r['algorithm']:26s} mean_norm {float(r['mean_norm']):7.2f}")

# %%
# Growth of T_F with n. With D = sqrt(n), a runtime of order sqrt(n*D)
# grows like n^0.75; the self-adjusting GA stays close to that, while the
# EA grows faster (coupon-collector effect).
for algo in ("ea+pa", "sa[1..n]+pa"):
    pts = [(float(r["n"]), float(r["mean_evals"])) for r in rows if r["algorithm"] == algo]
    print(algo, "T_F ~ n^%.3f" % fit_scaling_exponent(pts).exponent)
