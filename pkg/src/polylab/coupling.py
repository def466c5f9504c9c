"""Dyadic quantile coupling of a random walk with Gaussian partial sums.

The Gaussian path is drawn first.  The walk's total is the quantile transform
of the Gaussian total; each block sum is then split into its two halves by
the exact conditional quantile function, driven by the standardized Gaussian
bridge midpoint of the same block.  Every conditional uniform is independent
of the coarser levels, so the walk has its exact i.i.d. law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import special, stats

from .env import DistSpec
from .errors import InvalidArgumentError, UnsupportedDistributionError

MAX_LEVELS = 22


@dataclass(frozen=True)
class CoupledPaths:
    """``walk[k]`` = S_k and ``brownian[k]`` = T_k for k = 0..n."""

    n: int
    walk: np.ndarray
    brownian: np.ndarray
    dist: DistSpec
    block_sums: tuple = ()  # walk block sums per level, coarse to fine


@njit(cache=True, nogil=True)
def _hypergeom_quantile(u, pop, succ, draws):
    """Smallest k with P(X <= k) >= u for X ~ Hypergeometric(pop, succ, draws)."""
    kmin = max(0, draws - (pop - succ))
    kmax = min(draws, succ)
    logp = (math.lgamma(succ + 1) - math.lgamma(kmin + 1) - math.lgamma(succ - kmin + 1)
            + math.lgamma(pop - succ + 1) - math.lgamma(draws - kmin + 1)
            - math.lgamma(pop - succ - draws + kmin + 1)
            - (math.lgamma(pop + 1) - math.lgamma(draws + 1) - math.lgamma(pop - draws + 1)))
    acc = 0.0
    k = kmin
    while k < kmax:
        acc += math.exp(logp)
        if acc >= u:
            return k
        logp += math.log((succ - k) * (draws - k) / ((k + 1.0) * (pop - succ - draws + k + 1.0)))
        k += 1
    return kmax


@njit(cache=True, nogil=True)
def _split_rademacher(block, u, half):
    """Left-half sums of ±1 blocks of length 2 * half with sums ``block``."""
    out = np.empty(block.shape[0], dtype=np.int64)
    pop = 2 * half
    for i in range(block.shape[0]):
        succ = (block[i] + pop) // 2
        out[i] = 2 * _hypergeom_quantile(u[i], pop, succ, half) - half
    return out


def _check(dist, l_levels) -> DistSpec:
    dist = DistSpec.parse(dist)
    if dist not in (DistSpec.GAUSSIAN, DistSpec.RADEMACHER):
        raise UnsupportedDistributionError(f"coupling supports gaussian and rademacher only, got {dist.value}")
    if not 0 <= int(l_levels) <= MAX_LEVELS:
        raise InvalidArgumentError(f"l_levels must lie in [0, {MAX_LEVELS}], got {l_levels}")
    return dist


def dyadic_coupling(dist, l_levels: int, seed: int) -> CoupledPaths:
    dist = _check(dist, l_levels)
    n = 1 << int(l_levels)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(l_levels)]))
    xi = rng.standard_normal(n)
    brownian = np.concatenate(([0.0], np.cumsum(xi)))
    if dist is DistSpec.GAUSSIAN:
        return CoupledPaths(n, brownian.copy(), brownian, dist)

    # u in (0, 1) strictly: clip the far tails that round to 0 or 1
    tiny = np.finfo(float).tiny
    u_total = np.clip(special.ndtr(brownian[-1] / math.sqrt(n)), tiny, 1.0)
    sums = np.array([2 * int(stats.binom.ppf(u_total, n, 0.5)) - n], dtype=np.int64)
    levels = [sums]
    block = n
    while block > 1:
        half = block // 2
        g = xi.reshape(-1, block)
        t = g.sum(axis=1)
        t_left = g[:, :half].sum(axis=1)
        # left-half Gaussian sum given the block total: N(t / 2, block / 4)
        u = np.clip(special.ndtr((t_left - t / 2.0) / math.sqrt(block / 4.0)), tiny, 1.0)
        left = _split_rademacher(sums, u, half)
        nxt = np.empty(2 * len(sums), dtype=np.int64)
        nxt[0::2] = left
        nxt[1::2] = sums - left
        sums = nxt
        levels.append(sums)
        block = half
    walk = np.concatenate(([0.0], np.cumsum(sums, dtype=float)))
    return CoupledPaths(n, walk, brownian, dist, tuple(levels))


def sup_gap(paths: CoupledPaths) -> float:
    """max over k <= n of |S_k - T_k|."""
    return float(np.max(np.abs(paths.walk - paths.brownian)))


def median_sup_gap(dist, l_levels: int, seeds) -> float:
    return float(np.median([sup_gap(dyadic_coupling(dist, l_levels, s)) for s in seeds]))
