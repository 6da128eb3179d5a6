"""Bit-string genotype, the OneMax objective and evaluation accounting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np


class BudgetExhausted(RuntimeError):
    """Raised when a counted evaluation would exceed the evaluation budget."""


@dataclass(frozen=True, eq=False)
class BitString:
    """Immutable fixed-length bit string.

    Bits live in a read-only ``uint8`` array, so flipping a copy is O(1) per
    bit and the popcount is a single vectorised ``count_nonzero``.
    """

    bits: np.ndarray

    def __post_init__(self):
        arr = np.array(self.bits, dtype=np.uint8, copy=True).ravel()
        if arr.size == 0:
            raise ValueError("bit string must have positive length")
        if np.any(arr > 1):
            raise ValueError("bit values must be 0 or 1")
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    @classmethod
    def from_str(cls, s: str) -> "BitString":
        return cls(np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0"))

    @classmethod
    def ones(cls, n: int) -> "BitString":
        return cls(np.ones(n, dtype=np.uint8))

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls(np.zeros(n, dtype=np.uint8))

    @property
    def n(self) -> int:
        return int(self.bits.size)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def __str__(self) -> str:
        return (self.bits + ord("0")).tobytes().decode("ascii")

    def __repr__(self) -> str:
        s = str(self)
        if len(s) > 40:
            s = s[:37] + "..."
        return f"BitString('{s}', n={self.n})"

    def flipped(self, positions: Iterable[int]) -> "BitString":
        """Copy with the given positions flipped."""
        arr = self.bits.copy()
        if not isinstance(positions, np.ndarray):
            positions = list(positions)
        arr[np.asarray(positions, dtype=np.intp)] ^= 1
        return BitString(arr)


def onemax(x: BitString) -> int:
    return int(np.count_nonzero(x.bits))


def distance_to_optimum(x: BitString) -> int:
    return x.n - onemax(x)


def hamming(x: BitString, y: BitString) -> int:
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} != {y.n}")
    return int(np.count_nonzero(x.bits != y.bits))


class EvalCounter:
    """Number of objective calls made by one trial, with an optional cap."""

    __slots__ = ("count", "budget")

    def __init__(self, budget: int | None = None):
        if budget is not None and budget < 1:
            raise ValueError("budget must be positive or None")
        self.count = 0
        self.budget = budget

    @property
    def remaining(self) -> float:
        return float("inf") if self.budget is None else self.budget - self.count

    def __repr__(self) -> str:
        return f"EvalCounter(count={self.count}, budget={self.budget})"


def counted_eval(x: BitString, counter: EvalCounter) -> int:
    if counter.budget is not None and counter.count + 1 > counter.budget:
        raise BudgetExhausted(f"evaluation budget of {counter.budget} exhausted")
    counter.count += 1
    return onemax(x)
