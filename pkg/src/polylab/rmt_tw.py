"""Reference edge laws: the GUE top eigenvalue and the Tracy-Widom F2 distribution."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np
from scipy import integrate, special

from . import _kernels
from .env import replicate_seed
from .errors import DomainError, InvalidArgumentError, NumericError
from .stats import ks_one_sample, ks_two_sample

TW_SMIN = -10.0
TW_SMAX = 6.0
_X0 = 8.0
_BISECTION_TOL = 1e-10


def _gue_tridiagonal(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    # beta = 2 tridiagonal model: diagonal N(0, 1), off-diagonal chi_{2k} / sqrt(2)
    # for k = n-1..1.  Off-diagonal entries of the matching dense GUE have
    # E|H_ij|^2 = 1, so the spectrum edge sits at 2 sqrt(n).
    diag = rng.standard_normal(n)
    off2 = rng.chisquare(2.0 * np.arange(n - 1, 0, -1)) / 2.0 if n > 1 else np.empty(0)
    return diag, off2


def _top(diag, off2) -> float:
    lam = _kernels.tridiag_top_eigenvalue(diag, off2, _BISECTION_TOL)
    if not math.isfinite(lam):
        raise NumericError("Sturm bisection did not converge")
    return float(lam)


def gue_tridiagonal(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and squared off-diagonal of the tridiagonal GUE model used by :func:`sample_gue_top`."""
    n = int(n)
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, n]))
    return _gue_tridiagonal(n, rng)


def sample_gue_top(n: int, seed: int) -> float:
    """Largest eigenvalue of an n x n GUE matrix, concentrated at 2 sqrt(n)."""
    return _top(*gue_tridiagonal(n, seed))


def sample_gue_tops(n: int, count: int, seed: int) -> np.ndarray:
    return np.array([sample_gue_top(n, replicate_seed(seed, i)) for i in range(count)])


def rescale_gue(values, n: int) -> np.ndarray:
    """n^(1/6) (lambda_max - 2 sqrt(n)), which converges to F2."""
    return n ** (1.0 / 6.0) * (np.asarray(values, dtype=float) - 2.0 * math.sqrt(n))


@dataclass(frozen=True)
class TwTable:
    s_grid: np.ndarray
    cdf: np.ndarray
    built_tolerance: float
    log_cdf: np.ndarray = dc_field(repr=False)
    _solution: object = dc_field(repr=False, compare=False, default=None)

    def _integral(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < self.s_grid[0]) or np.any(s > self.s_grid[-1]):
            raise DomainError(f"s outside the table range [{self.s_grid[0]}, {self.s_grid[-1]}]")
        return self._solution(s)[3]

    def evaluate(self, s):
        """F2(s) from the dense ODE solution (not the grid)."""
        return np.exp(-self._integral(s))

    def survival(self, s):
        """1 - F2(s), accurate in the right tail."""
        return -np.expm1(-self._integral(s))

    def interp(self, s):
        """F2 by linear interpolation on the grid, clamped to [0, 1] outside it."""
        return np.interp(s, self.s_grid, self.cdf, left=0.0, right=1.0)

    def mean(self) -> float:
        """Mean of F2 by quadrature, E X = smax - integral of F (the mass below smin is negligible)."""
        s, f = self.s_grid, self.cdf
        return float(s[-1] - integrate.trapezoid(f, s) - s[0] * f[0])

    def quantile(self, p):
        return np.interp(p, self.cdf, self.s_grid)


def _painleve_rhs(x, y):
    u, du, v, _ = y
    return [du, 2.0 * u ** 3 + x * u, -u * u, -v]


def _initial_state(x0: float) -> list:
    # At x0 = 8 the Hastings-McLeod solution equals Ai to within ~Ai^3, far
    # below double precision relative to Ai itself; the tail integrals of Ai^2
    # have closed forms.
    ai, aip, _, _ = special.airy(x0)
    v = aip * aip - x0 * ai * ai
    big_i = (2.0 * x0 * x0 * ai * ai - 2.0 * x0 * aip * aip - ai * aip) / 3.0
    return [ai, aip, v, big_i]


@functools.lru_cache(maxsize=8)
def _build_table(smin: float, smax: float, points: int, tol: float) -> TwTable:
    if not smax <= _X0:
        raise DomainError(f"table cannot extend past the seeding point {_X0}")
    sol = integrate.solve_ivp(_painleve_rhs, (_X0, smin), _initial_state(_X0), method="DOP853",
                              rtol=tol, atol=tol * 1e-6, dense_output=True)
    if not sol.success:
        raise NumericError(f"Painleve II integration failed: {sol.message}")
    grid = np.linspace(smin, smax, points)
    big_i = sol.sol(grid)[3]
    cdf = np.exp(-big_i)
    if not (np.all(np.isfinite(cdf)) and np.all(np.diff(cdf) >= 0.0) and cdf[0] >= 0.0 and cdf[-1] <= 1.0):
        raise NumericError("Tracy-Widom table is not a monotone CDF")
    for arr in (grid, cdf, big_i):
        arr.setflags(write=False)
    return TwTable(grid, cdf, tol, -big_i, sol.sol)


def tw_table(smin: float = TW_SMIN, smax: float = TW_SMAX, points: int = 3201, tol: float = 1e-10) -> TwTable:
    """Build (or fetch from cache) the F2 table on an even grid over [smin, smax]."""
    if not smin < smax:
        raise InvalidArgumentError(f"need smin < smax, got {smin}, {smax}")
    if points < 2:
        raise InvalidArgumentError(f"need at least 2 grid points, got {points}")
    if not tol >= 1e-12:
        raise InvalidArgumentError(f"tolerance must be >= 1e-12, got {tol}")
    return _build_table(float(smin), float(smax), int(points), float(tol))


def tw_cdf(s, tol: float = 1e-8):
    """F2(s) for s in [-10, 6], from a table integrated at relative tolerance ``tol``."""
    if not tol >= 1e-8:
        raise InvalidArgumentError(f"tolerance must be >= 1e-8, got {tol}")
    out = tw_table(tol=float(tol)).evaluate(s)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Sample:
    values: np.ndarray
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size == 0:
            raise InvalidArgumentError("a Sample must be non-empty")
        object.__setattr__(self, "values", v)


def ks_distance(sample: Sample | Sequence[float], reference: TwTable | Sample | Sequence[float]) -> float:
    """One-sample KS against a TwTable (linear interpolation) or two-sample KS."""
    x = sample.values if isinstance(sample, Sample) else np.asarray(sample, dtype=float)
    if isinstance(reference, TwTable):
        return ks_one_sample(x, reference.interp)
    y = reference.values if isinstance(reference, Sample) else np.asarray(reference, dtype=float)
    return ks_two_sample(x, y)
