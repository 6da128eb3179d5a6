import json

import pytest

from fixedstart.cli import main
from fixedstart.harness import read_csv


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _write_config(tmp_path, **over):
    data = {"algorithms": ["rls", {"kind": "sa"}], "n_values": [64], "start": {"mode": "exact", "d_values": [4, 8]},
            "trials": 4, "master_seed": 1, "output_path": str(tmp_path / "run.csv")}
    data.update(over)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_run_config_and_override(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    code, _, err = _run(capsys, "run", "--config", cfg)
    assert code == 0 and "wrote 4 rows" in err
    assert {r["trials"] for r in read_csv(str(tmp_path / "run.csv"))} == {"4"}
    code, _, _ = _run(capsys, "run", "--config", cfg, "--trials", "2")
    assert code == 0
    assert {r["trials"] for r in read_csv(str(tmp_path / "run.csv"))} == {"2"}


def test_run_without_config_is_usage_error(capsys):
    code, _, err = _run(capsys, "run")
    assert code == 2 and "usage" in err


def test_bad_config_is_usage_error(tmp_path, capsys):
    code, _, err = _run(capsys, "run", "--config", _write_config(tmp_path, bogus=1))
    assert code == 2 and "bogus" in err


def test_missing_config_file_is_runtime_error(tmp_path, capsys):
    code, _, err = _run(capsys, "run", "--config", str(tmp_path / "nope.json"))
    assert code == 1 and "nope.json" in err


def test_sweep_requires_parameters(capsys):
    code, _, err = _run(capsys, "sweep", "--algo", "rls", "--n", "64")
    assert code == 2 and "--trials" in err


def test_sweep_and_fit(tmp_path, capsys, caplog):
    out = str(tmp_path / "sweep.csv")
    code, _, _ = _run(capsys, "sweep", "--algo", "sa,ht", "--beta", "2.5", "--u", "sqrt-n", "--n", "256",
                      "--d", "2,8,32", "--d-mode", "exact", "--trials", "5", "--seed", "3", "--out", out)
    assert code == 0
    assert {r["algorithm"] for r in read_csv(out)} == {"sa[1..n]", "ht(beta=2.5,u=sqrt-n)"}
    code, stdout, _ = _run(capsys, "fit", out)
    assert code == 0 and "sa[1..n]" in stdout
    code, _, err = _run(capsys, "fit", out, "--x", "nonsense")
    assert code == 2 and "unknown column" in err
    code, stdout, _ = _run(capsys, "fit", out, "--d", "2,8")
    assert code == 0 and "skipping sa[1..n]: 2 point(s)" in caplog.text


def test_fit_synthetic_power_law(tmp_path, capsys):
    path = tmp_path / "syn.csv"
    lines = ["algorithm,n,d_mode,d_nominal,trials,censored,mean_evals,std_evals,mean_norm,std_norm"]
    for d in (1, 4, 16, 64):
        lines.append(f"toy,100,exact,{d},1,0,{10 * d ** 0.5:g},0,0,0")
    path.write_text("\n".join(lines) + "\n")
    code, stdout, _ = _run(capsys, "fit", str(path))
    row = [l for l in stdout.splitlines() if l.startswith("toy")][0].split()
    assert code == 0 and float(row[2]) == pytest.approx(0.5, abs=1e-4) and float(row[4]) == pytest.approx(1.0)


def test_seed_env_fallback(tmp_path, capsys, monkeypatch):
    cfg = _write_config(tmp_path, master_seed=0)
    monkeypatch.setenv("FIXEDSTART_SEED", "99")
    _run(capsys, "run", "--config", cfg, "--out", str(tmp_path / "a.csv"))
    _run(capsys, "run", "--config", cfg, "--seed", "99", "--out", str(tmp_path / "b.csv"))
    monkeypatch.delenv("FIXEDSTART_SEED")
    _run(capsys, "run", "--config", cfg, "--out", str(tmp_path / "c.csv"))
    a, b, c = ((tmp_path / f"{x}.csv").read_bytes() for x in "abc")
    assert a == b != c


def test_predict(capsys):
    code, out, _ = _run(capsys, "predict", "--n", "10000", "--d", "100")
    assert code == 0 and "1000 " in out and "recommended" in out and "ht:beta=2" in out
    code, out, _ = _run(capsys, "predict", "--n", "10000", "--d", "100", "--beta", "2.5", "--u", "sqrt-n")
    assert code == 0 and "3162.28" in out
    code, _, err = _run(capsys, "predict", "--n", "10000", "--d", "0")
    assert code == 2 and "already optimal" in err
    code, _, err = _run(capsys, "predict", "--n", "10000", "--d", "100", "--beta", "1.5", "--u", "n/2")
    assert code == 2 and "beta >= 2" in err


def test_blackbox(capsys):
    code, out, _ = _run(capsys, "blackbox", "--n", "16", "--d", "4", "--runs", "20")
    assert code == 0 and "mean_queries" in out and "lower_bound" in out
    code, _, err = _run(capsys, "blackbox", "--n", "30", "--d", "10", "--runs", "1")
    assert code == 2 and "guard" in err


def test_selftest(capsys):
    code, out1, _ = _run(capsys, "selftest", "--seed", "5")
    assert code == 0 and out1.count("PASS") == 5
    code, out2, _ = _run(capsys, "selftest", "--seed", "5")
    assert out1 == out2
    code, out, _ = _run(capsys, "selftest", "--corrupt-normalizer")
    assert code == 1 and "FAIL  power-law pmf normalization" in out


def test_unknown_command_is_usage_error(capsys):
    code, _, _ = _run(capsys, "dance")
    assert code == 2
