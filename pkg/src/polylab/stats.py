"""Replicate statistics: moments, OLS, bootstrap errors and KS distances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class OlsFit:
    slope: float
    intercept: float
    stderr: float
    intercept_stderr: float
    residuals: np.ndarray


def ols(xs, ys) -> OlsFit:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise InvalidArgumentError("xs and ys must be 1-d sequences of equal length")
    if len(x) < 2:
        raise InvalidArgumentError(f"regression needs at least 2 points, got {len(x)}")
    if np.ptp(x) == 0:
        raise InvalidArgumentError("regression needs at least two distinct xs")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidArgumentError("regression inputs must be finite")
    if len(x) == 2:
        slope = (y[1] - y[0]) / (x[1] - x[0])
        intercept = y[0] - slope * x[0]
        return OlsFit(float(slope), float(intercept), 0.0, 0.0, np.zeros(2))
    fit = stats.linregress(x, y)
    resid = y - (fit.intercept + fit.slope * x)
    return OlsFit(float(fit.slope), float(fit.intercept), float(fit.stderr),
                  float(fit.intercept_stderr), resid)


def two_sample_regression(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    """Ordinary least squares ``ys ~ slope * xs + intercept``; returns (slope, intercept, stderr)."""
    fit = ols(xs, ys)
    return fit.slope, fit.intercept, fit.stderr


@dataclass(frozen=True)
class Summary:
    n: int
    mean: float
    sd: float
    q05: float
    q50: float
    q95: float

    def as_dict(self) -> dict:
        return {"n": self.n, "mean": self.mean, "sd": self.sd,
                "q05": self.q05, "q50": self.q50, "q95": self.q95}


def summarize(values) -> Summary:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise InvalidArgumentError("cannot summarize an empty sample")
    q05, q50, q95 = np.quantile(v, [0.05, 0.5, 0.95])
    # math.fsum keeps the mean independent of summation order
    mean = math.fsum(v) / v.size
    sd = math.sqrt(math.fsum((v - mean) ** 2) / (v.size - 1)) if v.size > 1 else 0.0
    return Summary(int(v.size), mean, sd, float(q05), float(q50), float(q95))


def bootstrap_se(samples: Sequence[np.ndarray], statistic: Callable, n_boot: int = 400, seed: int = 0) -> float:
    """Bootstrap standard error of ``statistic(samples)``, resampling each group independently."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, 0xB007]))
    groups = [np.asarray(s, dtype=float) for s in samples]
    values = np.empty(n_boot)
    for b in range(n_boot):
        values[b] = statistic([g[rng.integers(0, len(g), len(g))] for g in groups])
    return float(np.std(values, ddof=1))


def ks_two_sample(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise InvalidArgumentError("KS distance needs non-empty samples")
    return float(stats.ks_2samp(a, b).statistic)


def ks_one_sample(a, cdf: Callable) -> float:
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        raise InvalidArgumentError("KS distance needs a non-empty sample")
    return float(stats.kstest(a, cdf).statistic)


def ks_critical_two_sample(n: int, m: int, alpha: float = 0.01) -> float:
    """Asymptotic two-sample KS critical value c(alpha) sqrt((n + m) / (n m))."""
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c * math.sqrt((n + m) / (n * m))
