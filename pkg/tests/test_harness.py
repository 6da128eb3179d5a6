import json
import math
import random

import pytest
from hypothesis import given, strategies as st

from fixedstart.algorithms import RunRecord
from fixedstart.harness import (CSV_HEADER, AggregateStats, AlgorithmSpec, ConfigError, ExperimentConfig,
                                StartTemplate, TrialResult, aggregate, emit_csv, fit_scaling_exponent,
                                load_config, preset_config, read_csv, run_experiment)
from fixedstart.samplers import child_seed


def _config(tmp_path, **kw):
    base = dict(algorithms=("rls", AlgorithmSpec.make("sa")), n_values=(64, 128),
                start=StartTemplate("exact", d_values=(4, 8)), trials=5, master_seed=11,
                output_path=str(tmp_path / "out.csv"))
    base.update(kw)
    return ExperimentConfig(**base)


def test_single_trial_single_record(tmp_path):
    cfg = _config(tmp_path, algorithms=("rls",), n_values=(32,), start=StartTemplate("exact", d_values=(3,)),
                  trials=1)
    stats = run_experiment(cfg)
    assert len(stats) == 1 and stats[0].trials == 1 and math.isnan(stats[0].std_evals)


def test_cell_grid_is_row_major(tmp_path):
    cfg = _config(tmp_path)
    cells = cfg.cells()
    assert [(c.algorithm.label, c.n, c.d_nominal) for c in cells[:4]] == [
        ("rls", 64, 4.0), ("rls", 64, 8.0), ("rls", 128, 4.0), ("rls", 128, 8.0)]
    assert [c.index for c in cells] == list(range(8))


def test_eight_algorithms_seven_sizes_gives_56_cells():
    algs = [AlgorithmSpec.make("ht", beta=b) for b in (2.1, 2.3, 2.5, 2.7, 2.9)]
    algs += [AlgorithmSpec.make("sa"), AlgorithmSpec.make("sa", cap="log"), AlgorithmSpec.make("ea")]
    cfg = ExperimentConfig(tuple(algs), tuple(2 ** k for k in range(10, 17)),
                           StartTemplate("bernoulli", "sqrt"), 100)
    assert len(cfg.cells()) == 7 * 8


def test_seeds_follow_cell_and_trial(tmp_path):
    cfg = _config(tmp_path, raw_output_path=str(tmp_path / "raw.csv"))
    run_experiment(cfg)
    rows = read_csv(cfg.raw_output_path)
    assert len(rows) == 8 * 5
    cell_of = {(c.algorithm.label, c.n, c.d_nominal): c.index for c in cfg.cells()}
    for r in rows:
        cell = cell_of[(r["algorithm"], int(r["n"]), float(r["d_nominal"]))]
        assert int(r["seed"]) == child_seed(11, cell, int(r["trial"]))


def test_adding_trials_keeps_existing_seeds(tmp_path):
    a = _config(tmp_path, trials=3, raw_output_path=str(tmp_path / "a.csv"))
    b = _config(tmp_path, trials=6, raw_output_path=str(tmp_path / "b.csv"))
    run_experiment(a)
    run_experiment(b)
    ra, rb = read_csv(a.raw_output_path), read_csv(b.raw_output_path)
    kept = [r for r in rb if int(r["trial"]) < 3]
    assert ra == kept


def test_csv_byte_identical_and_worker_independent(tmp_path):
    cfg = _config(tmp_path)
    paths = []
    for i, workers in enumerate((1, 1, 3)):
        path = tmp_path / f"r{i}.csv"
        emit_csv(run_experiment(cfg, workers=workers), str(path))
        paths.append(path.read_bytes())
    assert paths[0] == paths[1] == paths[2]
    text = paths[0].decode()
    assert text.startswith(",".join(CSV_HEADER) + "\n") and "\r" not in text


def test_emit_csv_examples(tmp_path):
    path = tmp_path / "e.csv"
    emit_csv([], str(path))
    assert path.read_text() == ",".join(CSV_HEADER) + "\n"
    row = AggregateStats("x", 16, "exact", 4.0, 3, 0, 1 / 3, 0.1, 1 / 24, 0.0125)
    emit_csv([row], str(path))
    lines = path.read_text().splitlines()
    assert lines[1] == "x,16,exact,4,3,0,0.333333,0.1,0.0416667,0.0125"


def test_emit_csv_sorted(tmp_path):
    rows = [AggregateStats(a, n, "exact", d, 1, 0, 1.0, 0.0, 1.0, 0.0)
            for a, n, d in [("b", 8, 2.0), ("a", 16, 1.0), ("a", 8, 4.0), ("a", 8, 2.0)]]
    path = tmp_path / "s.csv"
    emit_csv(rows, str(path))
    keys = [(r["algorithm"], r["n"], r["d_nominal"]) for r in read_csv(str(path))]
    assert keys == [("a", "8", "2"), ("a", "8", "4"), ("a", "16", "1"), ("b", "8", "2")]


def test_emit_csv_error_has_path(tmp_path):
    bad = tmp_path / "missing" / "x.csv"
    with pytest.raises(OSError, match="missing"):
        emit_csv([], str(bad))


def _fake_results(evals, found):
    return [TrialResult(0, t, 0, RunRecord(1, e, f, 0, 0)) for t, (e, f) in enumerate(zip(evals, found))]


@given(st.lists(st.integers(0, 10 ** 9), min_size=2, max_size=40), st.randoms())
def test_aggregation_order_independent(evals, rnd):
    cell = _config_cell()
    results = _fake_results(evals, [True] * len(evals))
    shuffled = list(results)
    rnd.shuffle(shuffled)
    a, b = aggregate(cell, results), aggregate(cell, shuffled)
    assert a == b
    assert a.mean_norm * math.sqrt(cell.n * cell.d_nominal) == pytest.approx(a.mean_evals, rel=1e-9)
    mean = sum(evals) / len(evals)
    var = sum((e - mean) ** 2 for e in evals) / (len(evals) - 1)
    assert a.std_evals == pytest.approx(math.sqrt(var), rel=1e-6, abs=1e-6)


def _config_cell():
    cfg = ExperimentConfig(("rls",), (64,), StartTemplate("exact", d_values=(4,)), 1)
    return cfg.cells()[0]


def test_censored_trials_count_at_budget(tmp_path):
    cfg = _config(tmp_path, algorithms=("ea",), n_values=(256,), start=StartTemplate("exact", d_values=(128,)),
                  budget_factor=0.5, trials=4)
    (s,) = run_experiment(cfg)
    assert s.censored == 4 and s.mean_evals == 128.0


def test_fit_examples():
    f = fit_scaling_exponent([(1, 1), (2, 2), (4, 4), (8, 8)])
    assert f.exponent == pytest.approx(1.0) and f.r_squared == pytest.approx(1.0)
    f = fit_scaling_exponent([(x, 5 * math.sqrt(x)) for x in (1, 3, 9, 27)])
    assert f.exponent == pytest.approx(0.5)
    assert f.intercept == pytest.approx(math.log(5))
    assert f.r_squared == pytest.approx(1.0)


@pytest.mark.parametrize("points", [[(1, 1), (2, 2)], [(1, 1), (1, 2), (2, 3)], [(1, 1), (2, 0), (3, 3)],
                                    [(-1, 1), (2, 2), (3, 3)]])
def test_fit_rejects(points):
    with pytest.raises(ValueError):
        fit_scaling_exponent(points)


@given(st.floats(-3, 3), st.floats(0.01, 100),
       st.lists(st.floats(0.01, 1e4), min_size=3, max_size=10, unique=True))
def test_fit_recovers_power_law(k, a, xs):
    xs = sorted(xs)
    if xs[-1] / xs[0] < 1.5:
        return
    f = fit_scaling_exponent([(x, a * x ** k) for x in xs])
    assert f.exponent == pytest.approx(k, abs=1e-6)


def test_config_json_roundtrip(tmp_path):
    cfg = _config(tmp_path, algorithms=(AlgorithmSpec.make("ht", beta=2.5, u="sqrt-n"),
                                        AlgorithmSpec.make("static", lam="optimal"), "ea"))
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert load_config(str(path)) == cfg


@pytest.mark.parametrize("mutate, match", [
    (lambda d: d.update(colour="red"), "unknown config key"),
    (lambda d: d["start"].update(q=0.1), "unknown start key"),
    (lambda d: d.pop("trials"), "missing"),
    (lambda d: d.update(trials=0), "trials"),
    (lambda d: d.update(algorithms=[{"kind": "sa", "beta": 2}]), "unknown parameter"),
    (lambda d: d.update(algorithms=["simulated-annealing"]), "unknown algorithm"),
    (lambda d: d["start"].update(d_values=[1000]), "exceeds"),
])
def test_config_errors(tmp_path, mutate, match):
    data = _config(tmp_path).to_dict()
    mutate(data)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(ConfigError, match=match):
        load_config(str(path))


def test_presets():
    fig1 = preset_config("fig1")
    assert fig1.n_values == tuple(2 ** k for k in range(5, 17))
    assert fig1.start.figure == "sqrt" and fig1.trials == 100
    assert {a.kind for a in fig1.algorithms} == {"self-adjusting", "heavy-tailed", "ea", "rls"}
    assert len(fig1.algorithms) == 9
    assert preset_config("fig2", max_n=1024).n_values[-1] == 1024
    fig3 = preset_config("fig3", max_n=4096)
    assert fig3.n_values == (4096,) and fig3.start.d_values == tuple(2 ** i for i in range(12))
    with pytest.raises(ConfigError):
        preset_config("fig4")
