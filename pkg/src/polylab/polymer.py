"""Directed-polymer partition functions in log domain.

All partition values are natural logs.  ``normalized=True`` divides by the
number of directed paths (point-to-point partition function with respect to
the uniform path measure); ``normalized=False`` is the plain sum over paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._sweep import check_endpoint, planar_rows, row_end_values, sweep
from .env import DistSpec, EnvField, generate_field
from .errors import DomainError, InvalidArgumentError, NumericError, OutOfBoundsError
from .lpp import log_path_count, path_energies
from .special import digamma, trigamma

LogWeight = float


@dataclass(frozen=True)
class ScalingRegime:
    """Exponent ``a`` and constants ``beta``, ``gamma`` of the asymmetric regimes.

    ``beta_n(n) = beta * n**((a-1)/2)`` is the vanishing inverse temperature of
    the high-temperature regime; ``h_n(n) = gamma * n**((1-a)/2)`` the drift.
    """

    a: float
    beta: float
    gamma: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.a < 1.0:
            raise InvalidArgumentError(f"a must lie strictly inside (0, 1), got {self.a}")
        if not self.beta > 0.0 or not self.gamma > 0.0:
            raise InvalidArgumentError(f"beta and gamma must be positive, got {self.beta}, {self.gamma}")

    def beta_n(self, n: float) -> float:
        return self.beta * float(n) ** ((self.a - 1.0) / 2.0)

    def h_n(self, n: float) -> float:
        return self.gamma * float(n) ** ((1.0 - self.a) / 2.0)

    def free_energy_scale(self, n: float) -> float:
        """n**((1+a)/2), the order of the energies in both regimes."""
        return float(n) ** ((1.0 + self.a) / 2.0)


def _check_beta(beta):
    beta = float(beta)
    if not math.isfinite(beta):
        raise DomainError(f"beta must be finite, got {beta}")
    return beta


def log_partition(field: EnvField, end: Sequence[int], beta: float, normalized: bool = True) -> LogWeight:
    """log Z_beta(N, M) for the planar polymer."""
    if field.ndim != 2 or len(end) != 2:
        raise OutOfBoundsError("log_partition is planar; use log_partition_d in higher dimension")
    return log_partition_d(field, end, beta, normalized)


def log_partition_d(field: EnvField, end: Sequence[int], beta: float, normalized: bool = True) -> LogWeight:
    end = check_endpoint(field, end)
    beta = _check_beta(beta)
    value = sweep(field, end, beta)
    if normalized:
        value -= log_path_count(end)
    return value


def log_partition_bruteforce(field: EnvField, end: Sequence[int], beta: float,
                             normalized: bool = True, max_paths: int = 10**6) -> LogWeight:
    energies = beta * path_energies(field, end, max_paths)
    top = energies.max()
    value = float(top + math.log(np.exp(energies - top).sum()))
    if normalized:
        value -= math.log(len(energies))
    return value


def anti_diagonal_log_partitions(field: EnvField, n_total: int, beta: float, max_offset: int) -> np.ndarray:
    """Unnormalized log Z_beta(N - m, m) for m = 0..max_offset from one sweep."""
    beta = _check_beta(beta)
    out = np.empty(max_offset + 1)
    for m, v in planar_rows(field, n_total, max_offset, beta):
        out[m] = v
    return out


def boundary_free_energies(field: EnvField, n: int, h_values: Sequence[float], beta: float) -> dict:
    """(1/n) log Zbar_beta(n, floor(h n)) for each h, from one sweep of ``field``.

    The first coordinate is the long direction (x = 1); h = 0 gives the
    straight path along the axis.
    """
    beta = _check_beta(beta)
    rows = {float(h): int(math.floor(float(h) * n)) for h in h_values}
    if any(h < 0 for h in rows):
        raise InvalidArgumentError("h values must be non-negative")
    wanted = {}
    for m, v in row_end_values(field, n, max(rows.values()), beta):
        wanted[m] = v / n
    return {h: wanted[m] for h, m in rows.items()}


def boundary_entropy(h: float, x: Sequence[float]) -> float:
    """phi(h, x) = sum over x_i > 0 of h log((x_i + h)/h) + x_i log((x_i + h)/x_i)."""
    if h < 0 or any(xi < 0 for xi in x):
        raise InvalidArgumentError("h and x must be non-negative")
    if h == 0:
        return 0.0
    return sum(h * math.log((xi + h) / h) + xi * math.log((xi + h) / xi) for xi in x if xi > 0)


def log_segment_count(n: int, h: float, x: Sequence[float]) -> float:
    """log of prod_i C(floor(n x_i) + floor(n h), floor(n h)), the number of
    ways to place the transverse segments of a path to n (h, x)."""
    k = math.floor(n * h)
    total = 0.0
    for xi in x:
        m = math.floor(n * xi)
        total += math.lgamma(m + k + 1) - math.lgamma(m + 1) - math.lgamma(k + 1)
    return total


def mo_regime_endpoint(regime: ScalingRegime, n: int, alpha: Sequence[float]) -> tuple:
    xs = tuple(int(math.floor(al * float(n) ** regime.a)) for al in alpha)
    if any(x < 1 for x in xs):
        raise InvalidArgumentError(f"n={n} too small: transverse endpoint {xs} has a zero coordinate")
    return (int(n),) + xs


def mo_regime_estimate(regime: ScalingRegime, n: int, alpha: Sequence[float] = (1.0,), d: int | None = None,
                       seed: int = 0, dist=DistSpec.GAUSSIAN) -> float:
    """log Z_{beta_n}(n, alpha n^a) / (beta_n n^((1+a)/2)) on a fresh field."""
    alpha = tuple(float(x) for x in alpha)
    if d is not None and d != len(alpha):
        if len(alpha) != 1:
            raise InvalidArgumentError(f"alpha has {len(alpha)} entries but d={d}")
        alpha = alpha * d
    if len(alpha) < 1 or any(not x > 0 for x in alpha):
        raise InvalidArgumentError(f"alpha entries must be positive, got {alpha}")
    end = mo_regime_endpoint(regime, n, alpha)
    field = generate_field(dist, tuple(c + 1 for c in end), seed)
    b = regime.beta_n(n)
    return log_partition_d(field, end, b, normalized=True) / (b * regime.free_energy_scale(n))


def _stationary_point(beta2: float) -> float:
    """m* > 0 with trigamma(m*) = beta2, by bisection in log m."""
    lo, hi = -40.0, 40.0
    if not (trigamma(math.exp(lo)) > beta2 > trigamma(math.exp(hi))):
        raise NumericError(f"stationary point for beta^2={beta2} outside the bisection bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if trigamma(math.exp(mid)) > beta2:
            lo = mid
        else:
            hi = mid
    else:
        raise NumericError("bisection for the stationary point did not converge")
    return math.exp(0.5 * (lo + hi))


def mo_free_energy_exact(beta: float) -> float:
    """Closed-form Brownian-polymer free energy f(beta).

    f(beta) = m* beta^2 - digamma(m*) - 2 log|beta| with trigamma(m*) = beta^2,
    i.e. the stationary value of m -> m beta^2 - digamma(m).  This is the limit
    of (1/N) log of the *unnormalized* path integral over the simplex; the
    uniformly-normalized partition function converges to f(beta) - 1.
    """
    beta = _check_beta(beta)
    if beta == 0.0:
        return 0.0
    b2 = beta * beta
    m = _stationary_point(b2)
    return m * b2 - digamma(m) - 2.0 * math.log(abs(beta))
