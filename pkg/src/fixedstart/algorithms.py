"""The (1+(lambda,lambda)) GA with its lambda policies, the (1+1) EA and RLS.

Two engines run each algorithm:

``"fast"`` (default)
    compiled count-based loops from :mod:`fixedstart._engine`.
``"reference"``
    a literal bit-level implementation built on :func:`ga_iteration`,
    :class:`~fixedstart.core.EvalCounter` and explicit offspring. It is slow
    and is used to cross-check the fast engine on small instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import _engine
from .core import BitString, BudgetExhausted, EvalCounter, counted_eval, distance_to_optimum
from .initializers import StartSpec
from .samplers import biased_crossover, flip_random_bits, power_law, sample_binomial, sample_power_law

DEFAULT_BUDGET_FACTOR = 10_000


def resolve_u(u: int | str, n: int) -> int:
    """Resolve a power-law upper limit given as an integer or ``sqrt-n`` / ``n/2`` / ``n``."""
    if isinstance(u, str):
        key = u.strip().lower()
        if key in ("sqrt-n", "sqrt(n)", "sqrtn"):
            return max(1, math.isqrt(n))
        if key in ("n/2", "half-n"):
            return max(1, n // 2)
        if key == "n":
            return n
        try:
            u = float(key)
        except ValueError:
            raise ValueError(f"unknown upper limit {u!r}; use an integer, 'sqrt-n', 'n/2' or 'n'") from None
    if u != int(u) or u < 1:
        raise ValueError(f"upper limit must be a positive integer, got {u!r}")
    return int(u)


def resolve_cap(cap: float | str, n: int) -> float:
    """Resolve a self-adjusting cap: ``n``, ``log`` (2 ln(n+1)) or a number >= 1."""
    if isinstance(cap, str):
        key = cap.strip().lower()
        if key == "n":
            return float(n)
        if key in ("log", "ln"):
            return 2.0 * math.log(n + 1)
        cap = float(key)
    if cap < 1:
        raise ValueError(f"cap must be at least 1, got {cap}")
    return float(cap)


@dataclass(frozen=True)
class Static:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"static lambda must be positive, got {self.lam}")


@dataclass(frozen=True)
class FitnessDependent:
    """lambda = sqrt(n/d), recomputed from the current distance every iteration."""


@dataclass(frozen=True)
class SelfAdjusting:
    """One-fifth rule: lambda *= A after a non-improving iteration, /= A**4 after a strict improvement."""

    A: float = 1.2
    lambda0: float = 2.0
    cap: float | str = "n"
    strict_success: bool = True

    def __post_init__(self):
        if not self.A > 1:
            raise ValueError(f"update factor A must exceed 1, got {self.A}")
        if not self.lambda0 >= 1:
            raise ValueError(f"lambda0 must be at least 1, got {self.lambda0}")


@dataclass(frozen=True)
class HeavyTailed:
    beta: float
    u: int | str = "n/2"

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")


LambdaPolicy = Union[Static, FitnessDependent, SelfAdjusting, HeavyTailed]


@dataclass(frozen=True)
class GaParams:
    p: float
    c: float
    offspring: int

    @classmethod
    def standard(cls, lam: float, n: int) -> "GaParams":
        return cls(p=min(1.0, lam / n), c=min(1.0, 1.0 / lam), offspring=offspring_count(lam))


def offspring_count(lam: float) -> int:
    """round(lambda) with halves rounded up, at least 1."""
    return max(1, int(math.floor(lam + 0.5)))


@dataclass
class RunRecord:
    iterations: int
    evaluations: int
    found_optimum: bool
    final_fitness: int
    start_distance: int
    lambda_trace: list[tuple[int, float]] | None = field(default=None, repr=False)


def update_lambda_one_fifth(lam: float, strict_success: bool, A: float, cap: float) -> float:
    if strict_success:
        lam = lam / A ** 4
    else:
        lam = lam * A
    return min(cap, max(1.0, lam))


def _argmax_uniform(values: list[int], rng: np.random.Generator) -> int:
    best = max(values)
    winners = [i for i, v in enumerate(values) if v == best]
    return winners[0] if len(winners) == 1 else winners[int(rng.integers(len(winners)))]


def ga_iteration(x: BitString, lam: float, rng: np.random.Generator, counter: EvalCounter,
                 ell: int | None = None, practice_aware: bool = False) -> tuple[BitString, bool, bool]:
    """One literal iteration of the (1+(lambda,lambda)) GA with p = lam/n, c = 1/lam.

    Returns ``(x_next, improved, strict)`` where ``improved`` means f(y) >= f(x).
    ``ell`` forces the mutation strength instead of drawing it (test hook).
    Consumes exactly ``2*round(lam)`` evaluations; the parent's fitness is
    read without charge. With ``practice_aware``, ell is redrawn until
    positive, crossover offspring are redrawn until they differ from ``x``,
    and offspring equal to the mutation winner are not charged.
    """
    n = x.n
    params = GaParams.standard(lam, n)
    fx = n - distance_to_optimum(x)
    if ell is None:
        ell = sample_binomial(n, params.p, rng)
        while practice_aware and ell == 0:
            ell = sample_binomial(n, params.p, rng)

    mutants = [flip_random_bits(x, ell, rng) for _ in range(params.offspring)]
    fit = [counted_eval(z, counter) for z in mutants]
    best = _argmax_uniform(fit, rng)
    x_prime, f_prime = mutants[best], fit[best]

    children, fit = [], []
    for _ in range(params.offspring):
        z = biased_crossover(x, x_prime, params.c, rng)
        if practice_aware and x_prime != x:
            while z == x:
                z = biased_crossover(x, x_prime, params.c, rng)
            fit.append(f_prime if z == x_prime else counted_eval(z, counter))
        else:
            fit.append(counted_eval(z, counter))
        children.append(z)
    k = _argmax_uniform(fit, rng)
    fy = fit[k]
    if fy >= fx:
        return children[k], True, fy > fx
    return x, False, False


def _default_budget(n: int, budget: int | None) -> int:
    budget = DEFAULT_BUDGET_FACTOR * n if budget is None else int(budget)
    if budget < 1:
        raise ValueError(f"budget must be at least 1, got {budget}")
    return budget


def _record(iters, evals, d_final, n, start_d, trace=None) -> RunRecord:
    return RunRecord(iterations=int(iters), evaluations=int(evals), found_optimum=d_final == 0,
                     final_fitness=int(n - d_final), start_distance=int(start_d), lambda_trace=trace)


def _policy_arrays(policy: LambdaPolicy, n: int):
    """Encode a policy as (kind, lam, A, cap, cdf, strict) for the compiled loop."""
    empty = np.ones(1, dtype=np.float64)
    if isinstance(policy, Static):
        return _engine.STATIC, float(policy.lam), 2.0, float("inf"), empty, True
    if isinstance(policy, FitnessDependent):
        return _engine.FITNESS_DEPENDENT, 1.0, 2.0, float("inf"), empty, True
    if isinstance(policy, SelfAdjusting):
        cap = resolve_cap(policy.cap, n)
        lam0 = min(cap, max(1.0, policy.lambda0))
        return _engine.SELF_ADJUSTING, lam0, float(policy.A), cap, empty, policy.strict_success
    if isinstance(policy, HeavyTailed):
        dist = power_law(policy.beta, resolve_u(policy.u, n))
        return _engine.HEAVY_TAILED, 1.0, 2.0, float("inf"), dist.cdf_table, True
    raise TypeError(f"unknown lambda policy {policy!r}")


def _start(n: int, start: StartSpec | BitString, rng) -> BitString:
    if isinstance(start, BitString):
        if start.n != n:
            raise ValueError(f"start has length {start.n}, expected {n}")
        return start
    return start.draw(n, rng)


def run_ollga(n: int, start: StartSpec | BitString, policy: LambdaPolicy, budget: int | None,
              rng: np.random.Generator, *, engine: str = "fast", trace: int = 0,
              practice_aware: bool = False) -> RunRecord:
    """Run the GA until the optimum or the evaluation budget is reached.

    ``trace`` > 0 keeps a downsampled ``(iteration, lambda)`` trace of at most
    that many points. The start individual's own evaluation is not counted.
    """
    budget = _default_budget(n, budget)
    x = _start(n, start, rng)
    d0 = distance_to_optimum(x)
    if engine == "reference":
        return _run_ollga_reference(x, policy, budget, rng, d0, practice_aware)
    if engine != "fast":
        raise ValueError(f"unknown engine {engine!r}")
    kind, lam, A, cap, cdf, strict = _policy_arrays(policy, n)
    bits = np.array(x.bits, dtype=np.uint8)
    tr_it = np.zeros(max(0, trace) + (trace % 2), dtype=np.int64)
    tr_lam = np.zeros(tr_it.size, dtype=np.float64)
    iters, evals, d, tn = _engine.run_ollga(bits, rng, kind, lam, A, cap, cdf, budget, strict,
                                            practice_aware, tr_it, tr_lam)
    tr = [(int(i), float(v)) for i, v in zip(tr_it[:tn], tr_lam[:tn])] if trace else None
    return _record(iters, evals, d, n, d0, tr)


def _run_ollga_reference(x: BitString, policy: LambdaPolicy, budget: int,
                         rng: np.random.Generator, d0: int, practice_aware: bool) -> RunRecord:
    n = x.n
    counter = EvalCounter(budget)
    iters = 0
    dist = None
    cap = float("inf")
    if isinstance(policy, SelfAdjusting):
        cap = resolve_cap(policy.cap, n)
        lam = min(cap, max(1.0, policy.lambda0))
    elif isinstance(policy, HeavyTailed):
        dist = power_law(policy.beta, resolve_u(policy.u, n))
    elif isinstance(policy, Static):
        lam = policy.lam
    d = d0
    while d > 0:
        if isinstance(policy, FitnessDependent):
            lam = math.sqrt(n / d)
        elif dist is not None:
            lam = float(sample_power_law(dist, rng))
        if counter.remaining < 2 * offspring_count(lam):
            counter.count = budget
            break
        x, improved, strict = ga_iteration(x, lam, rng, counter, practice_aware=practice_aware)
        iters += 1
        d = distance_to_optimum(x)
        if isinstance(policy, SelfAdjusting):
            success = strict if policy.strict_success else improved
            lam = update_lambda_one_fifth(lam, success, policy.A, cap)
    return _record(iters, counter.count, d, n, d0)


def run_one_plus_one_ea(n: int, start: StartSpec | BitString, budget: int | None,
                        rng: np.random.Generator, *, engine: str = "fast",
                        practice_aware: bool = False) -> RunRecord:
    """Standard-bit mutation with rate 1/n, accept if not worse; one evaluation per iteration."""
    budget = _default_budget(n, budget)
    x = _start(n, start, rng)
    d0 = distance_to_optimum(x)
    if engine == "reference":
        return _run_mutation_only_reference(x, budget, rng, d0, single_bit=False,
                                            practice_aware=practice_aware)
    bits = np.array(x.bits, dtype=np.uint8)
    iters, evals, d, _ = _engine.run_one_plus_one_ea(bits, rng, budget, practice_aware)
    return _record(iters, evals, d, n, d0)


def run_rls(n: int, start: StartSpec | BitString, budget: int | None,
            rng: np.random.Generator, *, engine: str = "fast") -> RunRecord:
    """Flip one uniformly random bit, accept if not worse; one evaluation per iteration."""
    budget = _default_budget(n, budget)
    x = _start(n, start, rng)
    d0 = distance_to_optimum(x)
    if engine == "reference":
        return _run_mutation_only_reference(x, budget, rng, d0, single_bit=True)
    bits = np.array(x.bits, dtype=np.uint8)
    iters, evals, d, _ = _engine.run_rls(bits, rng, budget)
    return _record(iters, evals, d, n, d0)


def _run_mutation_only_reference(x, budget, rng, d0, single_bit, practice_aware=False):
    n = x.n
    counter = EvalCounter(budget)
    fx = n - d0
    iters = 0
    try:
        while fx < n:
            if single_bit:
                y = x.flipped([int(rng.integers(n))])
            else:
                mask = rng.random(n) < 1.0 / n
                while practice_aware and not mask.any():
                    mask = rng.random(n) < 1.0 / n
                y = BitString(x.bits ^ mask)
            fy = counted_eval(y, counter)
            iters += 1
            if fy >= fx:
                x, fx = y, fy
    except BudgetExhausted:
        pass
    return _record(iters, counter.count, n - fx, n, d0)
