"""Polymer with a huge drift: the Poissonized sum over anti-diagonal endpoints

    Z^(h) = sum_{1 <= n <= N} Zbar_beta(n, N - n) exp(-h (N - n))

its Laplace-method predictor, and Monte Carlo harnesses for its free energy,
fluctuation order and moderate-deviation tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np
from scipy import optimize

from .env import DistSpec, EnvField, generate_field, replicate_seed
from .errors import InvalidArgumentError, NumericError
from .polymer import ScalingRegime, anti_diagonal_log_partitions
from .stats import bootstrap_se, ols

# Terms with N - n beyond the truncation width must sit this far (in log
# units) below the dominant term; otherwise the width is doubled.
_MIN_MARGIN = 20.0


@dataclass(frozen=True)
class DriftResult:
    n_total: int
    beta: float
    h: float
    log_z: float
    argmax_n: int
    width: int
    terms: np.ndarray = dc_field(repr=False)  # log term for N - n = 0..width
    regime: ScalingRegime | None = None
    predictor: float | None = None

    @property
    def dominant_term(self) -> float:
        return float(self.terms[self.n_total - self.argmax_n])


def default_width(n_total: int, beta: float, h: float) -> int:
    """Transverse truncation N - n <= width.

    The dominant offset is c = beta^2 N / h^2.  At offset 3c the leading-order
    log-term 2 beta sqrt(N m) - h m has dropped by about c h / 2 from its peak.
    """
    if h <= 0:
        return n_total - 1
    center = (beta / h) ** 2 * n_total
    return int(min(n_total - 1, math.ceil(3.0 * center + 32)))


def _tail_margin(n_total: int) -> float:
    return max(_MIN_MARGIN, n_total ** 0.05)


def drifted_log_partition_h(field: EnvField, n_total: int, beta: float, h: float,
                            width: int | None = None) -> DriftResult:
    """log Z^(h) for fixed ``beta`` and drift ``h`` (no scaling regime).

    ``width=None`` picks :func:`default_width` and grows it until the last
    retained term is negligible; an explicit width is used as given.
    """
    n_total = int(n_total)
    if n_total < 1:
        raise InvalidArgumentError(f"n_total must be >= 1, got {n_total}")
    adaptive = width is None
    cap = min(n_total - 1, field.shape[1] - 1) if field.ndim == 2 else n_total - 1
    w = min(default_width(n_total, beta, h), cap) if adaptive else min(int(width), n_total - 1)
    while True:
        logz = anti_diagonal_log_partitions(field, n_total, beta, w)
        terms = logz - h * np.arange(w + 1)
        best = int(np.argmax(terms))
        top = terms[best]
        log_z = float(top + math.log(np.exp(terms - top).sum()))
        if not adaptive or w == n_total - 1 or terms[-1] < top - _tail_margin(n_total):
            break
        if w >= cap:
            raise NumericError(f"truncation at N - n = {w} is not negligible and the field is too narrow")
        w = min(cap, 2 * w + 1)
    return DriftResult(n_total, float(beta), float(h), log_z, n_total - best, w, terms)


def drifted_log_partition(field: EnvField, n_total: int, regime: ScalingRegime,
                          width: int | None = None) -> DriftResult:
    """log Z^(h_N) with beta and h_N = gamma N^((1-a)/2) taken from ``regime``."""
    res = drifted_log_partition_h(field, n_total, regime.beta, regime.h_n(n_total), width)
    _, pred = laplace_predictor(n_total, regime)
    return DriftResult(res.n_total, res.beta, res.h, res.log_z, res.argmax_n, res.width, res.terms,
                       regime, pred)


def drift_field(n_total: int, regime: ScalingRegime, dist, seed: int, width: int | None = None) -> EnvField:
    """Field wide enough for the default truncation (and one doubling of it)."""
    w = default_width(n_total, regime.beta, regime.h_n(n_total)) if width is None else width
    return generate_field(dist, (n_total + 1, min(n_total, 2 * w + 2)), seed)


def sample_log_z(regime: ScalingRegime, n_total: int, reps: int, seed: int, dist=DistSpec.GAUSSIAN) -> np.ndarray:
    out = np.empty(reps)
    for r in range(reps):
        field = drift_field(n_total, regime, dist, replicate_seed(seed, r))
        out[r] = drifted_log_partition_h(field, n_total, regime.beta, regime.h_n(n_total)).log_z
    return out


def _drift_objective(u, beta, h):
    return 2.0 * beta * math.sqrt(u) / (1.0 + u) - h * u / (1.0 + u)


def laplace_predictor(n_total: float, regime_or_beta, gamma: float | None = None,
                      a: float | None = None) -> tuple[float, float]:
    """Maximize f_N(u) = 2 beta sqrt(u)/(1+u) - gamma N^((1-a)/2) u/(1+u) over u >= 0.

    Returns ``(u_star, N * f_N(u_star))``.  Works in w = sqrt(u) with a bounded
    Brent search on [0, 1] (f_N is negative for u > 1).
    """
    if isinstance(regime_or_beta, ScalingRegime):
        beta, gamma, a = regime_or_beta.beta, regime_or_beta.gamma, regime_or_beta.a
    else:
        beta = float(regime_or_beta)
    n = float(n_total)
    h = gamma * n ** ((1.0 - a) / 2.0)
    if beta == 0.0:
        return 0.0, 0.0
    # f_N(w^2) is unimodal on [0, 1]; rescale so the optimum is O(1) in the search variable
    scale = min(1.0, beta / h)

    def neg(s):
        w = s * scale
        return -_drift_objective(w * w, beta, h)

    res = optimize.minimize_scalar(neg, bounds=(0.0, 1.0 / scale), method="bounded",
                                   options={"xatol": 1e-13, "maxiter": 500})
    if not res.success:
        raise NumericError(f"Laplace predictor did not converge: {res.message}")
    w = res.x * scale
    u = w * w
    return u, n * _drift_objective(u, beta, h)


def dominant_offset(n_total: int, regime: ScalingRegime) -> int:
    """N - n* for the integer n* nearest N / (1 + u*)."""
    u, _ = laplace_predictor(n_total, regime)
    return n_total - int(round(n_total / (1.0 + u)))


@dataclass
class FluctuationRecord:
    n_values: list
    second_moments: list
    means: list
    sds: list
    slope: float
    intercept: float
    stderr: float
    bootstrap_stderr: float
    residuals: list
    target_slope: float


def drift_fluctuations(regime: ScalingRegime, n_values: Sequence[int], reps: int, seed: int,
                       dist=DistSpec.GAUSSIAN, samples: dict | None = None) -> FluctuationRecord:
    """Regress log E[(log Z^(h_N) - (beta^2/gamma) N^((1+a)/2))^2] on log N.

    ``samples`` may carry precomputed replicate arrays keyed by N.
    """
    n_values = sorted(int(n) for n in n_values)
    if len(n_values) < 2:
        raise InvalidArgumentError("need at least two system sizes to fit a slope")
    if reps < 30:
        raise InvalidArgumentError(f"reps must be >= 30, got {reps}")
    if n_values[-1] < 16 * n_values[0]:
        raise InvalidArgumentError("system sizes must span at least a factor 16")
    samples = dict(samples or {})
    centered = []
    for i, n in enumerate(n_values):
        if n not in samples:
            samples[n] = sample_log_z(regime, n, reps, replicate_seed(seed, i), dist)
        centered.append(samples[n] - regime.beta ** 2 / regime.gamma * regime.free_energy_scale(n))
    m2 = np.array([np.mean(c ** 2) for c in centered])
    x = np.log(n_values)
    fit = ols(x, np.log(m2))

    def slope_of(resampled):
        return ols(x, np.log([np.mean(c ** 2) for c in resampled])).slope

    bse = bootstrap_se(centered, slope_of, n_boot=400, seed=seed)
    return FluctuationRecord(
        n_values=n_values,
        second_moments=m2.tolist(),
        means=[float(np.mean(c)) for c in centered],
        sds=[float(np.std(c, ddof=1)) for c in centered],
        slope=fit.slope,
        intercept=fit.intercept,
        stderr=fit.stderr,
        bootstrap_stderr=bse,
        residuals=fit.residuals.tolist(),
        target_slope=1.0 - regime.a / 3.0,
    )


@dataclass
class TailRecord:
    n_total: int
    reps: int
    center: float
    eps: list
    upper_freq: list
    lower_freq: list
    upper_scale: list  # N^a eps^(3/2)
    lower_scale: list  # N^(2a) eps^3


def deviation_tail_profile(regime: ScalingRegime, n_total: int, reps: int, eps_grid: Sequence[float],
                           seed: int, dist=DistSpec.GAUSSIAN, sample: np.ndarray | None = None) -> TailRecord:
    """Empirical frequencies of log Z^(h_N) >= x_N (1 + eps) and <= x_N (1 - eps)."""
    eps = sorted(float(e) for e in eps_grid)
    if any(e < 0 for e in eps):
        raise InvalidArgumentError("eps values must be non-negative")
    x = sample if sample is not None else sample_log_z(regime, n_total, reps, seed, dist)
    center = regime.beta ** 2 / regime.gamma * regime.free_energy_scale(n_total)
    na = float(n_total) ** regime.a
    return TailRecord(
        n_total=n_total,
        reps=len(x),
        center=center,
        eps=eps,
        upper_freq=[float(np.mean(x >= center * (1 + e))) for e in eps],
        lower_freq=[float(np.mean(x <= center * (1 - e))) for e in eps],
        upper_scale=[na * e ** 1.5 for e in eps],
        lower_scale=[na * na * e ** 3 for e in eps],
    )
