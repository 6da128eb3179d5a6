"""Random guessing on OneMax-type functions with a known start distance.

A OneMax-type instance ``OM_z(q) = n - H(q, z)`` hides its optimum ``z``.
The solver knows a point at distance D from ``z``, keeps every candidate
optimum consistent with all answers so far, queries random points until one
candidate is left and then queries that candidate. Bit strings are encoded
as integers (bit i = position i), so this is meant for n <= 24.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import BitString

MAX_N = 24
MAX_CANDIDATES = 10 ** 7


def to_mask(x: BitString) -> int:
    return int(np.dot(x.bits.astype(np.int64), 1 << np.arange(x.n, dtype=np.int64)))


def from_mask(mask: int, n: int) -> BitString:
    return BitString((mask >> np.arange(n)) & 1)


@dataclass(frozen=True)
class OmZInstance:
    z: BitString

    @property
    def n(self) -> int:
        return self.z.n

    def fitness(self, q: BitString) -> int:
        return self.n - int(np.count_nonzero(q.bits != self.z.bits))


@lru_cache(maxsize=8)
def _sphere_masks(n: int, D: int) -> np.ndarray:
    every = np.arange(1 << n, dtype=np.uint32)
    masks = every[np.bitwise_count(every) == D]
    masks.setflags(write=False)
    return masks


def random_instance(n: int, D: int, rng: np.random.Generator) -> tuple[OmZInstance, BitString]:
    """A uniformly random hidden optimum and a start point at distance D from it."""
    z = BitString(rng.integers(0, 2, size=n))
    start = z.flipped(rng.choice(n, size=D, replace=False)) if D else z
    return OmZInstance(z), start


def random_guessing_solve(instance: OmZInstance, start: BitString, D: int,
                          rng: np.random.Generator, *, sphere: bool = False) -> tuple[int, BitString]:
    """Return ``(queries, optimum)``.

    Queries are uniform on the cube, or on the distance-D sphere around
    ``start`` when ``sphere`` is set. The closing query of the last candidate
    is counted unless that candidate was the previous random query.
    """
    n = instance.n
    if start.n != n:
        raise ValueError(f"start has length {start.n}, expected {n}")
    if not 0 <= D <= n:
        raise ValueError(f"D={D} outside [0, {n}]")
    if n > MAX_N or math.comb(n, D) > MAX_CANDIDATES:
        raise ValueError(f"C({n}, {D}) = {math.comb(n, D)} candidates exceeds the guard "
                         f"(n <= {MAX_N}, at most {MAX_CANDIDATES} candidates)")

    s = np.uint32(to_mask(start))
    spheres = _sphere_masks(n, D)
    candidates = spheres ^ s
    queries = 0
    last = None
    while candidates.size > 1:
        if sphere:
            q = int(s ^ spheres[rng.integers(spheres.size)])
        else:
            q = int(rng.integers(0, 1 << n))
        answer = instance.fitness(from_mask(q, n))
        queries += 1
        last = q
        agree = n - np.bitwise_count(candidates ^ np.uint32(q)).astype(np.int64)
        candidates = candidates[agree == answer]
    survivor = int(candidates[0])
    if last != survivor:
        queries += 1
    found = from_mask(survivor, n)
    if instance.fitness(found) != n:
        raise AssertionError("consistency filtering lost the hidden optimum")
    return queries, found
