"""Starting individuals at a given (exact or expected) distance from the optimum."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import BitString


class StartMode(str, enum.Enum):
    EXACT = "exact"
    BERNOULLI = "bernoulli"


class Figure(str, enum.Enum):
    SQRT = "sqrt"        # q = 1/sqrt(n)
    LOG = "log"          # expected distance ln(n+1)
    FIXED_N = "fixed_n"  # expected distance D


@dataclass(frozen=True)
class StartSpec:
    """How to draw the initial individual.

    ``EXACT`` places exactly ``D`` zeros; ``BERNOULLI`` sets each bit to zero
    independently with probability ``q``.
    """

    mode: StartMode
    D: int | None = None
    q: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", StartMode(self.mode))
        if self.mode is StartMode.EXACT:
            if self.D is None or self.D < 0 or int(self.D) != self.D:
                raise ValueError(f"exact start needs an integer D >= 0, got {self.D!r}")
            object.__setattr__(self, "D", int(self.D))
        else:
            if self.q is None or not 0.0 <= self.q <= 1.0:
                raise ValueError(f"bernoulli start needs q in [0, 1], got {self.q!r}")

    @classmethod
    def exact(cls, D: int) -> "StartSpec":
        return cls(StartMode.EXACT, D=D)

    @classmethod
    def bernoulli(cls, q: float) -> "StartSpec":
        return cls(StartMode.BERNOULLI, q=float(q))

    def nominal_distance(self, n: int) -> float:
        """D for exact starts, the expected distance ``n*q`` otherwise."""
        if self.mode is StartMode.EXACT:
            return float(self.D)
        return n * self.q

    def draw(self, n: int, rng: np.random.Generator) -> BitString:
        if self.mode is StartMode.EXACT:
            return init_exact_distance(n, self.D, rng)
        return init_bernoulli(n, self.q, rng)


def init_exact_distance(n: int, D: int, rng: np.random.Generator) -> BitString:
    if not 0 <= D <= n:
        raise ValueError(f"distance D={D} outside [0, {n}]")
    bits = np.ones(n, dtype=np.uint8)
    if D:
        bits[rng.choice(n, size=D, replace=False)] = 0
    return BitString(bits)


def init_bernoulli(n: int, q: float, rng: np.random.Generator) -> BitString:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    return BitString((rng.random(n) >= q).astype(np.uint8))


def start_spec_for_figure(figure: Figure | str, n: int, D: int | None = None) -> StartSpec:
    """Bernoulli start used by each of the three experiment series.

    The logarithmic series uses the natural logarithm, ``q = ln(n+1)/n``.
    """
    figure = Figure(figure)
    if figure is Figure.SQRT:
        return StartSpec.bernoulli(1.0 / math.sqrt(n))
    if figure is Figure.LOG:
        return StartSpec.bernoulli(min(1.0, math.log(n + 1) / n))
    if D is None:
        raise ValueError("fixed_n figure mode requires D")
    if not 0 <= D <= n:
        raise ValueError(f"distance D={D} outside [0, {n}]")
    return StartSpec.bernoulli(D / n)
