"""Constant-free runtime predictions and bounds.

All values drop the hidden constants of the asymptotic statements and are
meant for shape comparisons only. Logarithms are natural. Inside runtime
expressions a log factor is read as ``max(1, ln x)``, the usual convention
that keeps O(log x) terms positive for small arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .algorithms import FitnessDependent, HeavyTailed, LambdaPolicy, SelfAdjusting, Static, resolve_u


class RegimeError(ValueError):
    """Inputs fall outside the range where a formula is stated."""


@dataclass(frozen=True)
class Prediction:
    expression_id: str
    value: float
    inputs: dict = field(default_factory=dict)


def _log(x: float) -> float:
    return max(1.0, math.log(x))


def progress_bound(d: int, lam: float, n: int) -> float:
    """min(1, d*lam^2/n): order of the strict-improvement probability of one iteration."""
    if not 1 <= d <= n:
        raise ValueError(f"distance must lie in [1, n], got d={d}, n={n}")
    if lam < 1:
        raise ValueError(f"lambda must be at least 1, got {lam}")
    return min(1.0, d * lam * lam / n)


def bernoulli_bound(p: float, lam: float) -> float:
    """Lower bound lam*p / (1 + lam*p) on 1 - (1-p)^lam."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    return lam * p / (1.0 + lam * p)


def optimal_static_lambda(n: int, D: int) -> float:
    if D < 2:
        raise RegimeError(f"optimal static lambda needs D >= 2 (ln D > 0), got D={D}")
    return math.sqrt(n * math.log(D) / D)


def blackbox_lower_bound(n: int, D: int) -> float:
    """D ln(n/D) / ln n, the order of the unrestricted black-box complexity."""
    if D < 1:
        raise RegimeError("D must be at least 1")
    if 2 * D > n:
        raise RegimeError(f"the bound is stated for D <= n/2, got n={n}, D={D}")
    return D * math.log(n / D) / math.log(n)


def _u_column(u: int | str, n: int, D: int, beta: float) -> tuple[str, float]:
    """Classify the upper limit as the sqrt(n/d) column or a u >= sqrt(n) column."""
    if isinstance(u, str) and u.strip().lower() in ("sqrt-n/d", "sqrt(n/d)"):
        return "sqrt-n/d", math.sqrt(n / D)
    value = resolve_u(u, n)
    is_sqrt_n = value in (math.isqrt(n), round(math.sqrt(n)))
    if is_sqrt_n:
        return "sqrt-n", float(value)
    if beta >= 2 and value >= math.sqrt(n):
        return "large-u", float(value)
    raise RegimeError(
        f"no runtime row for beta={beta} with u={value}: the table covers u = sqrt(n/d) and "
        f"u = sqrt(n) for every beta, and any u >= sqrt(n) only for beta >= 2")


def heavy_tailed_runtime(beta: float, u: int | str, n: int, D: int) -> tuple[str, float]:
    if not beta > 0:
        raise RegimeError(f"beta must be positive, got {beta}")
    column, uval = _u_column(u, n, D, beta)
    root = math.sqrt(n * D)
    if beta > 3:
        return "ht:beta>3", n * _log(D)
    if beta == 3:
        return "ht:beta=3", n * _log(D) / _log(n)
    if beta > 2:
        return "ht:2<beta<3", root * (n / D) ** ((beta - 2) / 2)
    if column == "sqrt-n/d":
        if beta == 2 or beta == 1:
            return f"ht:beta={beta:g}:u=sqrt(n/d)", root * _log(n / D)
        if beta > 1:
            return "ht:1<beta<2:u=sqrt(n/d)", root
        return "ht:0<beta<1:u=sqrt(n/d)", root * math.sqrt(n / D) ** (1 - beta)
    if beta == 2:
        # the log factor of this row is a log of the upper limit
        return "ht:beta=2", root * _log(uval)
    if beta > 1:
        return "ht:1<beta<2:u=sqrt(n)", root * D ** ((2 - beta) / 2)
    if beta == 1:
        return "ht:beta=1:u=sqrt(n)", math.sqrt(n) * D * _log(n)
    return "ht:0<beta<1:u=sqrt(n)", root * math.sqrt(D ** beta * n ** (1 - beta))


def predicted_runtime(policy: LambdaPolicy | str, n: int, D: int) -> Prediction:
    """Constant-free expected number of evaluations from distance D.

    ``policy`` is a lambda policy or one of ``"blackbox"``, ``"optimal-static"``.
    """
    if D == 0:
        raise RegimeError("D = 0: the start is already optimal")
    if not 1 <= D <= n:
        raise RegimeError(f"D must lie in [1, n], got D={D}, n={n}")
    if n < 2:
        raise RegimeError("n must be at least 2")
    inputs = {"n": n, "D": D}
    if policy == "blackbox":
        return Prediction("blackbox", blackbox_lower_bound(n, D), inputs)
    if policy == "optimal-static":
        lam = optimal_static_lambda(n, D)
        return Prediction("static:optimal", math.sqrt(n * D * math.log(D)), {**inputs, "lambda": lam})
    if isinstance(policy, (SelfAdjusting, FitnessDependent)):
        kind = "self-adjusting" if isinstance(policy, SelfAdjusting) else "fitness-dependent"
        return Prediction(kind, math.sqrt(n * D), inputs)
    if isinstance(policy, Static):
        lam = policy.lam
        value = n / lam * _log(n / lam ** 2) + D * lam
        return Prediction("static", value, {**inputs, "lambda": lam})
    if isinstance(policy, HeavyTailed):
        expr, value = heavy_tailed_runtime(policy.beta, policy.u, n, D)
        return Prediction(expr, value, {**inputs, "beta": policy.beta, "u": policy.u})
    raise TypeError(f"no prediction for {policy!r}")
