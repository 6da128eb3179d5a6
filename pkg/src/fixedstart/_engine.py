"""Compiled run loops for OneMax.

On OneMax the fitness of an offspring depends only on how many 0-bits and
1-bits of the parent it flips. The loops below draw those counts from
their exact laws (hypergeometric for an l-bit flip, binomial for a biased
crossover over the differing positions) and touch the genotype only when a
change is accepted. The parent is kept as a real bit array plus a
partition index: ``perm[:d]`` lists the 0-positions and ``perm[d:]`` the
1-positions, ``pos`` is its inverse. Accepting an offspring flips a uniformly
random subset of the right size on each side, so the genotype sequence
has the same law as under an explicit bit-level implementation.
"""

import math

import numpy as np
from numba import njit

from .samplers import _binomial, _hypergeometric, _power_law_draw, _uniform_int

STATIC = 0
FITNESS_DEPENDENT = 1
SELF_ADJUSTING = 2
HEAVY_TAILED = 3


@njit(cache=True)
def _partition(bits):
    n = bits.size
    perm = np.empty(n, dtype=np.int64)
    pos = np.empty(n, dtype=np.int64)
    d = 0
    for i in range(n):
        if bits[i] == 0:
            perm[d] = i
            d += 1
    j = d
    for i in range(n):
        if bits[i] != 0:
            perm[j] = i
            j += 1
    for k in range(n):
        pos[perm[k]] = k
    return perm, pos, d


@njit(cache=True)
def _swap(perm, pos, i, j):
    a = perm[i]
    b = perm[j]
    perm[i] = b
    perm[j] = a
    pos[b] = i
    pos[a] = j


@njit(cache=True)
def _apply_flips(rng, bits, perm, pos, d, n_good, n_bad, buf):
    """Flip ``n_good`` random 0-bits and ``n_bad`` random 1-bits; return new d."""
    n = bits.size
    for j in range(n_good):
        _swap(perm, pos, j, j + _uniform_int(rng, d - j))
        buf[j] = perm[j]
    for j in range(n_bad):
        _swap(perm, pos, d + j, d + j + _uniform_int(rng, n - d - j))
        buf[n_good + j] = perm[d + j]
    for j in range(n_good):
        p = buf[j]
        d -= 1
        _swap(perm, pos, pos[p], d)
        bits[p] = 1
    for j in range(n_bad):
        p = buf[n_good + j]
        _swap(perm, pos, pos[p], d)
        d += 1
        bits[p] = 0
    return d


@njit(cache=True)
def _trace_push(tr_it, tr_lam, tn, stride, it, lam):
    cap = tr_it.size
    if cap == 0 or it % stride != 0:
        return tn, stride
    if tn == cap:
        half = 0
        for k in range(0, cap, 2):
            tr_it[half] = tr_it[k]
            tr_lam[half] = tr_lam[k]
            half += 1
        tn = half
        stride *= 2
        if it % stride != 0:
            return tn, stride
    tr_it[tn] = it
    tr_lam[tn] = lam
    return tn + 1, stride


@njit(cache=True)
def ga_step_counts(rng, n, d, lam, practice_aware):
    """One iteration in count form: (evaluations, good flips, bad flips).

    With ``practice_aware`` the mutation strength is redrawn until positive,
    each crossover offspring is redrawn until it differs from the parent, and
    offspring equal to the mutation winner are not charged (their fitness is
    already known).
    """
    off = max(1, int(math.floor(lam + 0.5)))
    p = min(1.0, lam / n)
    c = min(1.0, 1.0 / lam)
    ell = _binomial(rng, n, p)
    if practice_aware:
        while ell == 0:
            ell = _binomial(rng, n, p)
    g_best = 0
    for _ in range(off):
        g = _hypergeometric(rng, ell, d, n)
        if g > g_best:
            g_best = g
    bad_avail = ell - g_best
    best_a = 0
    best_b = 0
    best_delta = -n - 1
    ties = 0
    cost = 2 * off
    for _ in range(off):
        a = _binomial(rng, g_best, c)
        b = _binomial(rng, bad_avail, c)
        if practice_aware:
            while a + b == 0:
                a = _binomial(rng, g_best, c)
                b = _binomial(rng, bad_avail, c)
            if a == g_best and b == bad_avail:
                cost -= 1
        delta = a - b
        if delta > best_delta:
            best_delta = delta
            best_a = a
            best_b = b
            ties = 1
        elif delta == best_delta:
            ties += 1
            # reservoir tie-break; replacing an identical pair changes nothing
            if (a != best_a) and _uniform_int(rng, ties) == 0:
                best_a = a
                best_b = b
    return cost, best_a, best_b


@njit(cache=True)
def progress_frequency(rng, n, d, lam, iterations):
    """Fraction of single iterations from distance d that strictly improve."""
    hits = 0
    for _ in range(iterations):
        _, a, b = ga_step_counts(rng, n, d, lam, False)
        if a > b:
            hits += 1
    return hits / iterations


@njit(cache=True)
def run_ollga(bits, rng, kind, lam_value, factor, cap, cdf, budget, strict_success,
              practice_aware, tr_it, tr_lam):
    """(1+(lambda,lambda)) GA from ``bits`` (modified in place).

    Returns (iterations, evaluations, final distance, trace length).
    """
    n = bits.size
    perm, pos, d = _partition(bits)
    buf = np.empty(n, dtype=np.int64)
    evals = 0
    iters = 0
    tn = 0
    stride = 1
    lam = lam_value
    factor4 = factor ** 4
    while d > 0:
        if kind == FITNESS_DEPENDENT:
            lam = math.sqrt(n / d)
        elif kind == HEAVY_TAILED:
            lam = float(_power_law_draw(rng, cdf))
        off = max(1, int(math.floor(lam + 0.5)))
        if evals + 2 * off > budget:
            evals = budget
            break
        tn, stride = _trace_push(tr_it, tr_lam, tn, stride, iters, lam)
        cost, a, b = ga_step_counts(rng, n, d, lam, practice_aware)
        evals += cost
        iters += 1
        if a >= b and a + b > 0:
            d = _apply_flips(rng, bits, perm, pos, d, a, b, buf)
        if kind == SELF_ADJUSTING:
            success = a > b if strict_success else a >= b
            if success:
                lam = max(1.0, min(cap, lam / factor4))
            else:
                lam = max(1.0, min(cap, lam * factor))
    return iters, evals, d, tn


@njit(cache=True)
def run_one_plus_one_ea(bits, rng, budget, practice_aware):
    n = bits.size
    perm, pos, d = _partition(bits)
    buf = np.empty(n, dtype=np.int64)
    p = 1.0 / n
    evals = 0
    while d > 0:
        if evals >= budget:
            break
        k = _binomial(rng, n, p)
        if practice_aware:
            while k == 0:
                k = _binomial(rng, n, p)
        evals += 1
        if k == 0:
            continue
        g = _hypergeometric(rng, k, d, n)
        if 2 * g >= k:
            d = _apply_flips(rng, bits, perm, pos, d, g, k - g, buf)
    return evals, evals, d, 0


@njit(cache=True)
def run_rls(bits, rng, budget):
    n = bits.size
    perm, pos, d = _partition(bits)
    evals = 0
    while d > 0:
        if evals >= budget:
            break
        j = _uniform_int(rng, n)
        evals += 1
        # perm[j] is a uniform position; it holds a 0 iff j < d
        if j < d:
            p = perm[j]
            d -= 1
            _swap(perm, pos, j, d)
            bits[p] = 1
    return evals, evals, d, 0
