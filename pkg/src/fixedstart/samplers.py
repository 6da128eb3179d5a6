"""Randomness primitives: seeding, binomial and hypergeometric counts,
the truncated discrete power law, uniform bit flips and biased crossover.

Every sampler takes a ``numpy.random.Generator`` (PCG64, 128-bit state).
The jitted ``_binomial`` / ``_hypergeometric`` routines are shared with the
compiled run loops in :mod:`fixedstart._engine`, so the public wrappers
here and the hot paths draw from one implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit

from .core import BitString

_MASK64 = (1 << 64) - 1


def mix64(z: int) -> int:
    """SplitMix64 finaliser: a bijective 64-bit avalanche mix."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def child_seed(master_seed: int, *indices: int) -> int:
    """Derive a stream seed from a master seed and a path of indices.

    ``h0 = mix64(master)``, then ``h = mix64(h ^ mix64(index))`` for each
    index in order. Adding trials to a cell never changes earlier seeds.
    """
    h = mix64(master_seed & _MASK64)
    for i in indices:
        h = mix64(h ^ mix64(int(i) & _MASK64))
    return h


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


# --- jitted primitives -----------------------------------------------------

_BINOMIAL_INVERSION_MAX_MEAN = 30.0
_HYPERGEOMETRIC_SEQUENTIAL_MAX = 20


@njit(cache=True)
def _uniform_int(rng, k):
    # float64 has 53 bits; the bias for k < 2**32 is below 2**-21 per value.
    return int(rng.random() * k)


@njit(cache=True)
def _binomial(rng, n, p):
    if n <= 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    flip = p > 0.5
    if flip:
        p = 1.0 - p
    if n * p >= _BINOMIAL_INVERSION_MAX_MEAN:
        x = rng.binomial(n, p)
    else:
        # inversion: walk the pmf upward from 0, O(np + 1) expected steps
        q = 1.0 - p
        s = p / q
        a = (n + 1) * s
        r0 = math.exp(n * math.log1p(-p))
        while True:
            u = rng.random()
            r = r0
            x = 0
            while u > r and x < n:
                u -= r
                x += 1
                r *= a / x - s
            if u <= r:
                break
    return n - x if flip else x


@njit(cache=True)
def _hyp_core(rng, k, good, total):
    # preconditions: 2k <= total, 2good <= total, so the support is [0, min(k, good)]
    if k == 0 or good == 0:
        return 0
    bad = total - good
    top = min(k, good)
    if top <= _HYPERGEOMETRIC_SEQUENTIAL_MAX:
        hits = 0
        rem_total = total
        if k <= good:
            rem_good = good
            for _ in range(k):
                if rng.random() * rem_total < rem_good:
                    hits += 1
                    rem_good -= 1
                rem_total -= 1
        else:
            rem_k = k
            for _ in range(good):
                if rng.random() * rem_total < rem_k:
                    hits += 1
                    rem_k -= 1
                    if rem_k == 0:
                        break
                rem_total -= 1
        return hits
    # inversion outward from the mode, O(sd) expected steps
    mode = ((k + 1) * (good + 1)) // (total + 2)
    if mode > top:
        mode = top
    logp = (math.lgamma(good + 1) - math.lgamma(mode + 1) - math.lgamma(good - mode + 1)
            + math.lgamma(bad + 1) - math.lgamma(k - mode + 1) - math.lgamma(bad - k + mode + 1)
            - math.lgamma(total + 1) + math.lgamma(k + 1) + math.lgamma(total - k + 1))
    pm = math.exp(logp)
    u = rng.random() - pm
    if u <= 0.0:
        return mode
    lo = mode
    hi = mode
    plo = pm
    phi = pm
    while lo > 0 or hi < top:
        if hi < top:
            phi *= (good - hi) * (k - hi) / ((hi + 1.0) * (bad - k + hi + 1.0))
            hi += 1
            u -= phi
            if u <= 0.0:
                return hi
        if lo > 0:
            lo -= 1
            plo *= (lo + 1.0) * (bad - k + lo + 1.0) / ((good - lo) * (k - lo))
            u -= plo
            if u <= 0.0:
                return lo
    return mode


@njit(cache=True)
def _hypergeometric(rng, k, good, total):
    """Number of 'good' items in a uniform k-subset of ``total`` items."""
    kk = k
    flip_k = 2 * kk > total
    if flip_k:
        kk = total - kk
    gg = good
    flip_g = 2 * gg > total
    if flip_g:
        gg = total - gg
    h = _hyp_core(rng, kk, gg, total)
    if flip_g:
        h = kk - h
    if flip_k:
        h = good - h
    return h


@njit(cache=True)
def _power_law_draw(rng, cdf):
    return np.searchsorted(cdf, rng.random(), side="right") + 1


@njit(cache=True)
def _binomial_many(rng, n, p, size):
    out = np.empty(size, dtype=np.int64)
    for i in range(size):
        out[i] = _binomial(rng, n, p)
    return out


@njit(cache=True)
def _hypergeometric_many(rng, k, good, total, size):
    out = np.empty(size, dtype=np.int64)
    for i in range(size):
        out[i] = _hypergeometric(rng, k, good, total)
    return out


# --- public API --------------------------------------------------------------

def sample_binomial(n: int, p: float, rng: np.random.Generator, size: int | None = None):
    """Draw from Bin(n, p); inversion for small means, BTPE otherwise."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if size is None:
        return int(_binomial(rng, int(n), float(p)))
    return _binomial_many(rng, int(n), float(p), int(size))


def sample_hypergeometric(k: int, good: int, total: int, rng: np.random.Generator,
                          size: int | None = None):
    """Number of marked items among ``k`` drawn without replacement."""
    if not (0 <= good <= total and 0 <= k <= total):
        raise ValueError(f"invalid hypergeometric parameters k={k}, good={good}, total={total}")
    if size is None:
        return int(_hypergeometric(rng, int(k), int(good), int(total)))
    return _hypergeometric_many(rng, int(k), int(good), int(total), int(size))


@dataclass(frozen=True)
class PowerLawDist:
    """Power law on ``[1..u]`` with ``Pr[i] = normalizer * i**-beta``.

    Use :func:`power_law` to get a cached instance; the CDF table is built
    once per ``(beta, u)`` and is read-only.
    """

    beta: float
    u: int
    normalizer: float = field(init=False)
    cdf_table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if int(self.u) != self.u or self.u < 1:
            raise ValueError(f"u must be a positive integer, got {self.u}")
        object.__setattr__(self, "u", int(self.u))
        weights = np.arange(1, self.u + 1, dtype=np.float64) ** -float(self.beta)
        # sum smallest terms first to limit rounding error
        total = math.fsum(weights[::-1])
        cdf = np.cumsum(weights) / total
        cdf[-1] = 1.0
        cdf.setflags(write=False)
        object.__setattr__(self, "normalizer", 1.0 / total)
        object.__setattr__(self, "cdf_table", cdf)


@lru_cache(maxsize=256)
def power_law(beta: float, u: int) -> PowerLawDist:
    return PowerLawDist(float(beta), int(u))


def power_law_pmf(dist: PowerLawDist, i: int) -> float:
    if 1 <= i <= dist.u:
        return dist.normalizer * float(i) ** -dist.beta
    return 0.0


def sample_power_law(dist: PowerLawDist, rng: np.random.Generator, size: int | None = None):
    """Inverse-CDF draw(s) via binary search on the cached table."""
    if size is None:
        return int(_power_law_draw(rng, dist.cdf_table))
    u = rng.random(size)
    return np.searchsorted(dist.cdf_table, u, side="right") + 1


def flip_random_bits(x: BitString, ell: int, rng: np.random.Generator) -> BitString:
    """Copy of ``x`` with a uniformly random ``ell``-subset of positions flipped."""
    if not 0 <= ell <= x.n:
        raise ValueError(f"cannot flip {ell} bits of a length-{x.n} string")
    if ell == 0:
        return x
    return x.flipped(rng.choice(x.n, size=ell, replace=False))


def biased_crossover(x: BitString, x_prime: BitString, c: float,
                     rng: np.random.Generator) -> BitString:
    """Take each bit from ``x_prime`` with probability ``c``, else from ``x``."""
    if x.n != x_prime.n:
        raise ValueError(f"length mismatch: {x.n} != {x_prime.n}")
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"c must lie in [0, 1], got {c}")
    take = rng.random(x.n) < c
    return BitString(np.where(take, x_prime.bits, x.bits))
