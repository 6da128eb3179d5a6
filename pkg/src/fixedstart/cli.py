"""Command-line front end: ``fixedstart run|sweep|predict|fit|blackbox|selftest``.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import copy
import dataclasses
import logging
import math
import os
import sys
from collections import defaultdict
from typing import Callable, Sequence

import numpy as np

from . import blackbox as bb
from . import harness, theory
from .algorithms import HeavyTailed, SelfAdjusting, Static, FitnessDependent, run_rls
from .core import BitString, hamming
from .initializers import StartSpec
from .samplers import child_seed, flip_random_bits, make_rng, power_law, power_law_pmf

log = logging.getLogger("fixedstart")


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _u_value(text: str) -> int | str:
    return int(text) if text.isdigit() else text


def _lambda_value(text: str) -> float | str:
    return text if text == "optimal" else float(text)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, help="master seed (fallback: $FIXEDSTART_SEED, then 0)")
    common.add_argument("-v", "--verbose", action="store_true")

    exp = argparse.ArgumentParser(add_help=False)
    exp.add_argument("--config", help="JSON experiment config")
    exp.add_argument("--preset", choices=("fig1", "fig2", "fig3"))
    exp.add_argument("--max-n", type=int, default=harness.DEFAULT_MAX_N,
                     help="largest n used by presets (default 2^16)")
    exp.add_argument("--n", type=_ints, help="problem sizes, e.g. 1024,4096")
    exp.add_argument("--d", type=_ints, help="start distances")
    exp.add_argument("--d-mode", choices=("exact", "bernoulli"))
    exp.add_argument("--trials", type=int)
    exp.add_argument("--workers", type=int, default=1)
    exp.add_argument("--budget-factor", type=float)
    exp.add_argument("--algo", help="comma-separated: sa, fitdep, static, ht, ea, rls")
    exp.add_argument("--beta", type=float, help="power-law exponent for ht")
    exp.add_argument("--u", type=_u_value, help="power-law upper limit: integer, sqrt-n or n/2")
    exp.add_argument("--a", type=float, help="one-fifth update factor A for sa")
    exp.add_argument("--cap", choices=("n", "log"), help="lambda cap for sa")
    exp.add_argument("--lambda", dest="lam", type=_lambda_value, help="static lambda or 'optimal'")
    exp.add_argument("--practice-aware", action="store_true",
                     help="do not charge offspring identical to a known individual")
    exp.add_argument("--raw-out", help="also write one CSV line per trial")
    exp.add_argument("--out", help="CSV output path")

    p = argparse.ArgumentParser(prog="fixedstart", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common, exp], help="run a config file or preset")
    sub.add_parser("sweep", parents=[common, exp], help="run a sweep defined by flags only")

    pr = sub.add_parser("predict", parents=[common], help="constant-free runtime predictions")
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--d", type=int, required=True)
    pr.add_argument("--beta", type=float)
    pr.add_argument("--u", type=_u_value)
    pr.add_argument("--lambda", dest="lam", type=float)

    fit = sub.add_parser("fit", parents=[common], help="log-log exponent per algorithm")
    fit.add_argument("csv")
    fit.add_argument("--x", default="d_nominal", help="x column (default d_nominal)")
    fit.add_argument("--y", default="mean_evals", help="y column (default mean_evals)")
    fit.add_argument("--algo", help="only these algorithms (comma-separated labels)")
    fit.add_argument("--n", type=_ints, help="only rows with these n")
    fit.add_argument("--d", type=_ints, help="only rows with these d_nominal")

    b = sub.add_parser("blackbox", parents=[common], help="random guessing on OneMax-type functions")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--runs", type=int, default=100)
    b.add_argument("--sphere", action="store_true", help="query the distance-D sphere only")

    st = sub.add_parser("selftest", parents=[common], help="fast invariant checks")
    st.add_argument("--corrupt-normalizer", action="store_true", help=argparse.SUPPRESS)
    return p


def _seed(args) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("FIXEDSTART_SEED")
    if env is None:
        return None
    try:
        return _u64(env)
    except (ValueError, argparse.ArgumentTypeError):
        raise UsageError(f"FIXEDSTART_SEED must be an unsigned 64-bit integer, got {env!r}") from None


# --- run / sweep ---------------------------------------------------------------

def _algorithms_from_flags(args) -> list[harness.AlgorithmSpec]:
    out = []
    for name in args.algo.split(","):
        kind = name.strip().lower()
        kind = harness._KIND_ALIASES.get(kind, kind)
        params: dict = {}
        if kind == "self-adjusting":
            if args.a is not None:
                params["A"] = args.a
            if args.cap is not None:
                params["cap"] = args.cap
        elif kind == "heavy-tailed":
            if args.beta is None:
                raise UsageError("ht requires --beta")
            params["beta"] = args.beta
            if args.u is not None:
                params["u"] = args.u
        elif kind == "static":
            if args.lam is None:
                raise UsageError("static requires --lambda")
            params["lam"] = args.lam
        out.append(harness.AlgorithmSpec(kind, tuple(params.items()),
                                         practice_aware=args.practice_aware))
    return out


def _start_from_flags(args, base: harness.StartTemplate | None) -> harness.StartTemplate:
    mode = args.d_mode or (base.mode if base else None)
    if mode is None:
        raise UsageError("--d-mode is required")
    if mode == "exact":
        d_values = args.d or (base.d_values if base and base.mode == "exact" else None)
        if not d_values:
            raise UsageError("exact starts require --d")
        return harness.StartTemplate("exact", None, tuple(d_values))
    if args.d:
        return harness.StartTemplate("bernoulli", "fixed_n", tuple(args.d))
    if base and base.mode == "bernoulli":
        return base
    raise UsageError("bernoulli starts need --d (expected distances) or a preset")


def _build_config(args, flags_only: bool) -> harness.ExperimentConfig:
    seed = _seed(args)
    if flags_only:
        if args.config or args.preset:
            raise UsageError("sweep takes flags only; use run for --config/--preset")
        missing = [f for f, v in (("--algo", args.algo), ("--n", args.n), ("--trials", args.trials)) if not v]
        if missing:
            raise UsageError(f"sweep requires {', '.join(missing)}")
        cfg = harness.ExperimentConfig(tuple(_algorithms_from_flags(args)), tuple(args.n),
                                       _start_from_flags(args, None), args.trials,
                                       seed or 0, args.budget_factor or 10_000.0,
                                       args.out or "sweep.csv", args.raw_out)
        return cfg
    if args.config and args.preset:
        raise UsageError("give either --config or --preset, not both")
    if args.config:
        cfg = harness.load_config(args.config)
    elif args.preset:
        cfg = harness.preset_config(args.preset, max_n=args.max_n)
    else:
        raise UsageError("run needs --config PATH or --preset NAME")
    changes: dict = {}
    if args.algo:
        changes["algorithms"] = tuple(_algorithms_from_flags(args))
    if args.n:
        changes["n_values"] = tuple(args.n)
    if args.d or args.d_mode:
        changes["start"] = _start_from_flags(args, cfg.start)
    if args.trials is not None:
        changes["trials"] = args.trials
    if seed is not None:
        changes["master_seed"] = seed
    if args.budget_factor is not None:
        changes["budget_factor"] = args.budget_factor
    if args.out:
        changes["output_path"] = args.out
    if args.raw_out:
        changes["raw_output_path"] = args.raw_out
    return dataclasses.replace(cfg, **changes) if changes else cfg


def _print_table(headers: Sequence[str], rows: Sequence[Sequence[str]], file=None) -> None:
    file = file or sys.stdout
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    print("  ".join(h.ljust(w) for h, w in zip(headers, widths)), file=file)
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)), file=file)


def cmd_run(args, flags_only: bool = False) -> int:
    cfg = _build_config(args, flags_only)
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    stats = harness.run_experiment(cfg, workers=args.workers)
    harness.emit_csv(stats, cfg.output_path)
    rows = [[s.algorithm, str(s.n), harness._fmt(s.d_nominal), harness._fmt(s.mean_evals),
             harness._fmt(s.mean_norm), harness._fmt(s.std_norm), str(s.censored)]
            for s in harness._sorted_stats(stats)]
    _print_table(["algorithm", "n", "D", "mean_evals", "mean_norm", "std_norm", "censored"], rows,
                 file=sys.stderr)
    print(f"wrote {len(stats)} rows to {cfg.output_path}", file=sys.stderr)
    return 0


# --- predict -------------------------------------------------------------------

def cmd_predict(args) -> int:
    n, D = args.n, args.d
    if D == 0:
        raise UsageError("D = 0: the start is already optimal, nothing to predict")
    policies: list[tuple[str, object]] = []
    if args.beta is not None:
        policies.append((f"heavy-tailed beta={args.beta:g} u={args.u or 'n/2'}",
                         HeavyTailed(args.beta, args.u if args.u is not None else "n/2")))
    if args.lam is not None:
        policies.append((f"static lambda={args.lam:g}", Static(args.lam)))
    if not policies:
        policies = [
            ("self-adjusting", SelfAdjusting()),
            ("fitness-dependent", FitnessDependent()),
            ("heavy-tailed beta=2 u=sqrt-n (recommended)", HeavyTailed(2.0, "sqrt-n")),
        ]
        if D >= 2:
            policies.append(("static, optimal lambda", "optimal-static"))
    rows = []
    for label, pol in policies:
        try:
            pred = theory.predicted_runtime(pol, n, D)
        except theory.RegimeError as e:
            raise UsageError(str(e)) from None
        rows.append([label, pred.expression_id, f"{pred.value:.6g}"])
    if 2 * D <= n:
        rows.append(["black-box lower bound", "blackbox", f"{theory.blackbox_lower_bound(n, D):.6g}"])
    _print_table(["policy", "expression", "predicted_evals"], rows)
    return 0


# --- fit -----------------------------------------------------------------------

def cmd_fit(args) -> int:
    rows = harness.read_csv(args.csv)
    columns = set(rows[0]) if rows else set(harness.CSV_HEADER)
    for col in (args.x, args.y):
        if col not in columns:
            raise UsageError(f"unknown column {col!r}; available: {', '.join(sorted(columns))}")
    keep_algo = set(args.algo.split(",")) if args.algo else None
    groups: dict[str, list[tuple[float, float]]] = defaultdict(list)
    for r in rows:
        if keep_algo and r["algorithm"] not in keep_algo:
            continue
        if args.n and int(r["n"]) not in args.n:
            continue
        if args.d and float(r["d_nominal"]) not in args.d:
            continue
        groups[r["algorithm"]].append((float(r[args.x]), float(r[args.y])))
    out = []
    for algo in sorted(groups):
        pts = groups[algo]
        if len(pts) < 3:
            log.warning("skipping %s: %d point(s), need at least 3", algo, len(pts))
            continue
        try:
            fit = harness.fit_scaling_exponent(pts)
        except ValueError as e:
            log.warning("skipping %s: %s", algo, e)
            continue
        out.append([algo, str(len(pts)), f"{fit.exponent:.4f}", f"{fit.intercept:.4f}",
                    f"{fit.r_squared:.4f}"])
    _print_table(["algorithm", "points", "exponent", "intercept", "r_squared"], out)
    return 0


# --- blackbox ------------------------------------------------------------------

def cmd_blackbox(args) -> int:
    n, D = args.n, args.d
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    if not 0 <= D <= n:
        raise UsageError(f"D must lie in [0, n], got D={D}, n={n}")
    if n > bb.MAX_N or math.comb(n, D) > bb.MAX_CANDIDATES:
        raise UsageError(f"C({n}, {D}) = {math.comb(n, D)} candidates exceeds the guard "
                         f"(n <= {bb.MAX_N}, at most {bb.MAX_CANDIDATES})")
    master = _seed(args) or 0
    queries = []
    for r in range(args.runs):
        rng = make_rng(child_seed(master, r))
        inst, start = bb.random_instance(n, D, rng)
        q, found = bb.random_guessing_solve(inst, start, D, rng, sphere=args.sphere)
        if found != inst.z:
            print(f"run {r}: returned a wrong optimum", file=sys.stderr)
            return 1
        queries.append(q)
    qs = np.asarray(queries, dtype=float)
    std = qs.std(ddof=1) if qs.size > 1 else float("nan")
    rows = [["runs", str(args.runs)], ["mean_queries", f"{qs.mean():.6g}"], ["std_queries", f"{std:.6g}"]]
    if 1 <= D and 2 * D <= n:
        rows.append(["lower_bound", f"{theory.blackbox_lower_bound(n, D):.6g}"])
    _print_table(["quantity", "value"], rows)
    return 0


# --- selftest ------------------------------------------------------------------

def _check_bernoulli_bound() -> str | None:
    for p in np.linspace(0.0, 1.0, 100):
        for lam in np.linspace(0.5, 50.0, 100):
            if 1.0 - (1.0 - p) ** lam < theory.bernoulli_bound(p, lam) - 1e-15:
                return f"violated at p={p:.4g}, lambda={lam:.4g}"
    return None


def _check_pmf(corrupt: bool) -> str | None:
    for beta in (1.5, 2.0, 2.5, 3.5):
        for u in (10, 1000):
            dist = power_law(beta, u)
            if corrupt:
                dist = copy.copy(dist)
                object.__setattr__(dist, "normalizer", dist.normalizer * 1.01)
            total = math.fsum(power_law_pmf(dist, i) for i in range(1, u + 1))
            if abs(total - 1.0) > 1e-9:
                return f"pmf sums to {total!r} for beta={beta}, u={u}"
    return None


def _check_flip_distance(seed: int) -> str | None:
    rng = make_rng(child_seed(seed, 1))
    for n in (1, 7, 64):
        x = BitString(rng.integers(0, 2, size=n))
        for ell in range(n + 1):
            if hamming(x, flip_random_bits(x, ell, rng)) != ell:
                return f"flip of {ell} bits at n={n} moved a different distance"
    return None


def _check_one_fifth() -> str | None:
    from .algorithms import update_lambda_one_fifth
    for A in (1.1, 1.2, 1.5):
        lam = 8.0
        for _ in range(4):
            lam = update_lambda_one_fifth(lam, False, A, 1e9)
        lam = update_lambda_one_fifth(lam, True, A, 1e9)
        if abs(lam - 8.0) > 1e-9:
            return f"four failures and one success moved lambda 8 -> {lam} for A={A}"
    return None


def _check_rls(seed: int) -> str | None:
    n, D, trials = 256, 16, 2000
    target = n * sum(1.0 / i for i in range(1, D + 1))
    total = 0
    for t in range(trials):
        total += run_rls(n, StartSpec.exact(D), None, make_rng(child_seed(seed, 2, t))).evaluations
    mean = total / trials
    if abs(mean - target) > 0.05 * target:
        return f"mean {mean:.1f} vs n*H_D = {target:.1f}"
    return None


def selftest(seed: int = 0, corrupt_normalizer: bool = False) -> list[tuple[str, str | None]]:
    checks: list[tuple[str, Callable[[], str | None]]] = [
        ("bernoulli bound on 100x100 grid", _check_bernoulli_bound),
        ("power-law pmf normalization", lambda: _check_pmf(corrupt_normalizer)),
        ("flip distance equals ell", lambda: _check_flip_distance(seed)),
        ("one-fifth rule neutrality", _check_one_fifth),
        ("RLS mean vs n*H_D at n=256, D=16", lambda: _check_rls(seed)),
    ]
    return [(name, fn()) for name, fn in checks]


def cmd_selftest(args) -> int:
    results = selftest(_seed(args) or 0, args.corrupt_normalizer)
    for name, err in results:
        print(f"{'PASS' if err is None else 'FAIL'}  {name}" + (f": {err}" if err else ""))
    return 0 if all(err is None for _, err in results) else 1


# --- entry point ---------------------------------------------------------------

def main(argv: Sequence[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    handlers = {"run": cmd_run, "sweep": lambda a: cmd_run(a, flags_only=True),
                "predict": cmd_predict, "fit": cmd_fit, "blackbox": cmd_blackbox,
                "selftest": cmd_selftest}
    try:
        return handlers[args.command](args)
    except (UsageError, harness.ConfigError) as e:
        print(f"fixedstart {args.command}: error: {e}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError) as e:
        print(f"fixedstart {args.command}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
