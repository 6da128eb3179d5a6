"""Declarative experiment sweeps: seeding, parallel trials, aggregation, CSV output."""

from __future__ import annotations

import csv
import dataclasses
import itertools
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Sequence

import numpy as np

from .algorithms import (FitnessDependent, HeavyTailed, RunRecord, SelfAdjusting, Static,
                         run_ollga, run_one_plus_one_ea, run_rls)
from .initializers import Figure, StartMode, StartSpec, start_spec_for_figure
from .samplers import child_seed, make_rng
from .theory import optimal_static_lambda

log = logging.getLogger(__name__)

CSV_HEADER = ("algorithm", "n", "d_mode", "d_nominal", "trials", "censored",
              "mean_evals", "std_evals", "mean_norm", "std_norm")

ALGORITHM_KINDS = ("static", "fitness-dependent", "self-adjusting", "heavy-tailed", "ea", "rls")
_KIND_ALIASES = {"sa": "self-adjusting", "fitdep": "fitness-dependent", "ht": "heavy-tailed",
                 "fast": "heavy-tailed", "(1+1)ea": "ea", "one-plus-one-ea": "ea"}
_PARAM_KEYS = {
    "static": {"lam"},
    "fitness-dependent": set(),
    "self-adjusting": {"A", "lambda0", "cap", "strict_success"},
    "heavy-tailed": {"beta", "u"},
    "ea": set(),
    "rls": set(),
}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else format(x, ".6g")


@dataclass(frozen=True)
class AlgorithmSpec:
    """One algorithm column of a sweep.

    ``params`` holds policy hyperparameters; ``lam`` may be ``"optimal"``
    (resolved per cell from n and the nominal distance), ``u`` and ``cap``
    accept the symbolic forms understood by the algorithms module.
    ``practice_aware`` switches to the accounting that skips evaluating
    offspring identical to a known individual.
    """

    kind: str
    params: tuple = ()
    name: str | None = None
    practice_aware: bool = False

    def __post_init__(self):
        kind = _KIND_ALIASES.get(self.kind.lower(), self.kind.lower())
        if kind not in ALGORITHM_KINDS:
            raise ConfigError(f"unknown algorithm {self.kind!r}; choose from {', '.join(ALGORITHM_KINDS)}")
        params = dict(self.params)
        unknown = set(params) - _PARAM_KEYS[kind]
        if unknown:
            raise ConfigError(f"unknown parameter(s) {sorted(unknown)} for {kind}")
        if kind == "static" and "lam" not in params:
            raise ConfigError("static algorithm requires 'lam'")
        if kind == "heavy-tailed" and "beta" not in params:
            raise ConfigError("heavy-tailed algorithm requires 'beta'")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", tuple(sorted(params.items())))
        self.policy(64, 8.0)  # validate eagerly

    @classmethod
    def make(cls, kind: str, name: str | None = None, practice_aware: bool = False, **params):
        return cls(kind, tuple(params.items()), name, practice_aware)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        p = dict(self.params)
        if self.kind == "self-adjusting":
            cap = p.get("cap", "n")
            label = "sa[1..2ln(n+1)]" if str(cap).lower() in ("log", "ln") else f"sa[1..{cap}]"
            if "A" in p:
                label += f"(A={p['A']:g})"
        elif self.kind == "heavy-tailed":
            label = f"ht(beta={p['beta']:g},u={p.get('u', 'n/2')})"
        elif self.kind == "static":
            lam = p["lam"]
            label = f"static(lambda={lam if isinstance(lam, str) else format(lam, 'g')})"
        elif self.kind == "fitness-dependent":
            label = "fitdep"
        else:
            label = self.kind
        return label + ("+pa" if self.practice_aware else "")

    def policy(self, n: int, d_nominal: float):
        p = dict(self.params)
        if self.kind == "static":
            lam = p["lam"]
            if isinstance(lam, str):
                if lam != "optimal":
                    raise ConfigError(f"static lambda must be a number or 'optimal', got {lam!r}")
                lam = optimal_static_lambda(n, max(2, round(d_nominal)))
            return Static(float(lam))
        if self.kind == "fitness-dependent":
            return FitnessDependent()
        if self.kind == "self-adjusting":
            return SelfAdjusting(**p)
        if self.kind == "heavy-tailed":
            return HeavyTailed(**p)
        return None

    def run(self, n: int, start: StartSpec, budget: int, rng: np.random.Generator,
            d_nominal: float) -> RunRecord:
        if self.kind == "ea":
            return run_one_plus_one_ea(n, start, budget, rng, practice_aware=self.practice_aware)
        if self.kind == "rls":
            return run_rls(n, start, budget, rng)
        return run_ollga(n, start, self.policy(n, d_nominal), budget, rng,
                         practice_aware=self.practice_aware)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind, **dict(self.params)}
        if self.name:
            out["name"] = self.name
        if self.practice_aware:
            out["practice_aware"] = True
        return out

    @classmethod
    def from_dict(cls, data: dict | str) -> "AlgorithmSpec":
        if isinstance(data, str):
            return cls(data)
        data = dict(data)
        try:
            kind = data.pop("kind")
        except KeyError:
            raise ConfigError(f"algorithm entry without 'kind': {data}") from None
        name = data.pop("name", None)
        pa = bool(data.pop("practice_aware", False))
        return cls(kind, tuple(data.items()), name, pa)


@dataclass(frozen=True)
class StartTemplate:
    """Start specification for every cell: exact D values or a Bernoulli figure mode."""

    mode: str
    figure: str | None = None
    d_values: tuple = ()

    def __post_init__(self):
        mode = StartMode(self.mode).value
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "d_values", tuple(int(d) for d in self.d_values))
        if mode == "exact":
            if self.figure is not None:
                raise ConfigError("exact starts take 'd_values', not 'figure'")
            if not self.d_values:
                raise ConfigError("exact starts require a non-empty 'd_values'")
        else:
            fig = Figure(self.figure or "")
            object.__setattr__(self, "figure", fig.value)
            if fig is Figure.FIXED_N and not self.d_values:
                raise ConfigError("bernoulli fixed_n starts require 'd_values'")
            if fig is not Figure.FIXED_N and self.d_values:
                raise ConfigError(f"bernoulli '{fig.value}' starts do not take 'd_values'")
        if any(d < 1 for d in self.d_values):
            raise ConfigError("distances must be at least 1 (runtime is normalised by sqrt(n*D))")

    def distances(self) -> tuple:
        return self.d_values or (None,)

    def spec(self, n: int, D: int | None) -> StartSpec:
        if D is not None and D > n:
            raise ConfigError(f"distance {D} exceeds n={n}")
        if self.mode == "exact":
            return StartSpec.exact(D)
        return start_spec_for_figure(self.figure, n, D)


@dataclass(frozen=True)
class ExperimentConfig:
    algorithms: tuple
    n_values: tuple
    start: StartTemplate
    trials: int
    master_seed: int = 0
    budget_factor: float = 10_000.0
    output_path: str = "results.csv"
    raw_output_path: str | None = None

    def __post_init__(self):
        algs = tuple(a if isinstance(a, AlgorithmSpec) else AlgorithmSpec.from_dict(a)
                     for a in self.algorithms)
        object.__setattr__(self, "algorithms", algs)
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if isinstance(self.start, dict):
            object.__setattr__(self, "start", StartTemplate(**self.start))
        if not algs:
            raise ConfigError("at least one algorithm is required")
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ConfigError("n_values must be a non-empty list of positive integers")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials}")
        if not self.budget_factor > 0:
            raise ConfigError("budget_factor must be positive")
        if not 0 <= int(self.master_seed) < 2 ** 64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        labels = [a.label for a in algs]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"algorithm labels must be unique, got {labels}")
        for n, D in itertools.product(self.n_values, self.start.distances()):
            self.start.spec(n, D)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        missing = {"algorithms", "n_values", "start", "trials"} - set(data)
        if missing:
            raise ConfigError(f"missing required config key(s): {', '.join(sorted(missing))}")
        start = data["start"]
        if not isinstance(start, dict):
            raise ConfigError("'start' must be an object")
        unknown = set(start) - {f.name for f in dataclasses.fields(StartTemplate)}
        if unknown:
            raise ConfigError(f"unknown start key(s): {', '.join(sorted(unknown))}")
        try:
            return cls(**{**data, "start": StartTemplate(**start)})
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e)) from e

    def to_dict(self) -> dict:
        return {
            "algorithms": [a.to_dict() for a in self.algorithms],
            "n_values": list(self.n_values),
            "start": {"mode": self.start.mode, "figure": self.start.figure,
                      "d_values": list(self.start.d_values)},
            "trials": self.trials,
            "master_seed": self.master_seed,
            "budget_factor": self.budget_factor,
            "output_path": self.output_path,
            "raw_output_path": self.raw_output_path,
        }

    def budget(self, n: int) -> int:
        return max(1, int(round(self.budget_factor * n)))

    def cells(self) -> list["Cell"]:
        """Row-major (algorithm, n, D) grid."""
        out = []
        grid = itertools.product(self.algorithms, self.n_values, self.start.distances())
        for index, (alg, n, D) in enumerate(grid):
            spec = self.start.spec(n, D)
            out.append(Cell(index, alg, n, spec, spec.nominal_distance(n), self.budget(n)))
        return out


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise OSError(f"cannot read config {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return ExperimentConfig.from_dict(data)


@dataclass(frozen=True)
class Cell:
    index: int
    algorithm: AlgorithmSpec
    n: int
    start: StartSpec
    d_nominal: float
    budget: int


@dataclass(frozen=True)
class TrialResult:
    cell: int
    trial: int
    seed: int
    record: RunRecord = field(compare=False)


@dataclass(frozen=True)
class AggregateStats:
    algorithm: str
    n: int
    d_mode: str
    d_nominal: float
    trials: int
    censored: int
    mean_evals: float
    std_evals: float
    mean_norm: float
    std_norm: float

    def csv_row(self) -> list[str]:
        return [self.algorithm, str(self.n), self.d_mode, _fmt(self.d_nominal), str(self.trials),
                str(self.censored), _fmt(self.mean_evals), _fmt(self.std_evals),
                _fmt(self.mean_norm), _fmt(self.std_norm)]


def run_trial(cell: Cell, trial: int, master_seed: int) -> TrialResult:
    seed = child_seed(master_seed, cell.index, trial)
    record = cell.algorithm.run(cell.n, cell.start, cell.budget, make_rng(seed), cell.d_nominal)
    return TrialResult(cell.index, trial, seed, record)


def _run_chunk(args) -> list[TrialResult]:
    cell, trials, master_seed = args
    return [run_trial(cell, t, master_seed) for t in trials]


def aggregate(cell: Cell, results: Sequence[TrialResult]) -> AggregateStats:
    """Exact integer moments, so the outcome does not depend on result order."""
    evals = [r.record.evaluations for r in results]
    k = len(evals)
    if k == 0:
        raise ValueError("cannot aggregate an empty cell")
    censored = sum(1 for r in results if not r.record.found_optimum)
    s1 = sum(evals)
    s2 = sum(e * e for e in evals)
    mean = s1 / k
    std = math.sqrt((k * s2 - s1 * s1) / (k * (k - 1))) if k > 1 else float("nan")
    scale = math.sqrt(cell.n * cell.d_nominal)
    return AggregateStats(cell.algorithm.label, cell.n, cell.start.mode.value, cell.d_nominal, k,
                          censored, mean, std, mean / scale, std / scale)


def run_experiment(config: ExperimentConfig, workers: int = 1,
                   chunk_size: int = 25) -> list[AggregateStats]:
    """Run every (algorithm, n, D) cell for ``config.trials`` trials.

    Trial t of cell c is seeded with ``child_seed(master_seed, c, t)``, so the
    output is the same for every worker count.
    """
    cells = config.cells()
    tasks = []
    for cell in cells:
        for lo in range(0, config.trials, chunk_size):
            tasks.append((cell, range(lo, min(config.trials, lo + chunk_size)), config.master_seed))
    if workers <= 1:
        chunks = map(_run_chunk, tasks)
        results = [r for chunk in chunks for r in chunk]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for chunk in pool.map(_run_chunk, tasks) for r in chunk]
    by_cell: dict[int, list[TrialResult]] = {c.index: [] for c in cells}
    for r in results:
        by_cell[r.cell].append(r)
    stats = []
    for cell in cells:
        rows = sorted(by_cell[cell.index], key=lambda r: r.trial)
        agg = aggregate(cell, rows)
        if agg.censored:
            log.warning("%s n=%d D=%g: %d of %d trials hit the budget of %d evaluations",
                        agg.algorithm, agg.n, agg.d_nominal, agg.censored, agg.trials, cell.budget)
        stats.append(agg)
    if config.raw_output_path:
        emit_raw_csv(cells, by_cell, config.raw_output_path)
    return stats


def _sorted_stats(stats):
    return sorted(stats, key=lambda s: (s.algorithm, s.n, s.d_nominal))


def emit_csv(stats: Sequence[AggregateStats], path: str) -> None:
    """Write aggregate rows (sorted by algorithm, n, d_nominal); sample std uses divisor trials-1."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for s in _sorted_stats(stats):
                writer.writerow(s.csv_row())
    except OSError as e:
        raise OSError(f"cannot write CSV to {path}: {e.strerror or e}") from e


RAW_HEADER = ("algorithm", "n", "d_mode", "d_nominal", "trial", "seed", "start_distance",
              "iterations", "evaluations", "found_optimum")


def emit_raw_csv(cells, by_cell, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(RAW_HEADER)
            for cell in cells:
                for r in sorted(by_cell[cell.index], key=lambda r: r.trial):
                    rec = r.record
                    writer.writerow([cell.algorithm.label, cell.n, cell.start.mode.value,
                                     _fmt(cell.d_nominal), r.trial, r.seed, rec.start_distance,
                                     rec.iterations, rec.evaluations, int(rec.found_optimum)])
    except OSError as e:
        raise OSError(f"cannot write CSV to {path}: {e.strerror or e}") from e


def read_csv(path: str) -> list[dict]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return list(csv.DictReader(fh))
    except OSError as e:
        raise OSError(f"cannot read CSV {path}: {e.strerror or e}") from e


class ScalingFit(NamedTuple):
    exponent: float
    intercept: float
    r_squared: float


def fit_scaling_exponent(points: Sequence[tuple[float, float]]) -> ScalingFit:
    """Least-squares line through (ln x, ln y); the slope is the scaling exponent."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ValueError("need at least 3 (x, y) points")
    if np.any(pts <= 0):
        raise ValueError("x and y must be positive for a log-log fit")
    if len(np.unique(pts[:, 0])) != len(pts):
        raise ValueError("x values must be distinct")
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(float(slope), float(intercept), r2)


# --- reference experiment presets ---------------------------------------------

FIG_BETAS = (2.1, 2.3, 2.5, 2.7, 2.9)
FIG3_SMALL_BETAS = (1.5, 1.7, 1.9)
DEFAULT_MAX_N = 2 ** 16


def _figure_algorithms(extra_small_beta: bool = False) -> list[AlgorithmSpec]:
    algs = [AlgorithmSpec.make("self-adjusting", cap="log", practice_aware=True),
            AlgorithmSpec.make("self-adjusting", cap="n", practice_aware=True)]
    algs += [AlgorithmSpec.make("heavy-tailed", beta=b, u="n/2", practice_aware=True) for b in FIG_BETAS]
    if extra_small_beta:
        algs += [AlgorithmSpec.make("heavy-tailed", beta=b, u="sqrt-n", practice_aware=True)
                 for b in FIG3_SMALL_BETAS]
    algs += [AlgorithmSpec.make("ea", practice_aware=True), AlgorithmSpec.make("rls")]
    return algs


def preset_config(name: str, max_n: int = DEFAULT_MAX_N, trials: int = 100, master_seed: int = 0,
                  output_path: str | None = None) -> ExperimentConfig:
    """The three reference experiment series, scaled to ``n <= max_n``.

    ``fig1``: expected start distance sqrt(n); ``fig2``: ln(n+1);
    ``fig3``: one n = min(2^22, max_n) and expected distances 2^i, i < log2 n.
    """
    if max_n < 32:
        raise ConfigError("max_n must be at least 32")
    sizes = [2 ** k for k in range(5, 23) if 2 ** k <= max_n]
    if name in ("fig1", "fig2"):
        start = StartTemplate("bernoulli", "sqrt" if name == "fig1" else "log")
        algs = _figure_algorithms()
    elif name == "fig3":
        n = max(s for s in sizes)
        sizes = [n]
        start = StartTemplate("bernoulli", "fixed_n", tuple(2 ** i for i in range(int(math.log2(n)))))
        algs = _figure_algorithms(extra_small_beta=True)
    else:
        raise ConfigError(f"unknown preset {name!r}; choose fig1, fig2 or fig3")
    return ExperimentConfig(tuple(algs), tuple(sizes), start, trials, master_seed,
                            output_path=output_path or f"{name}.csv")
