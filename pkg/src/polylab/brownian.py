"""Semi-discrete Brownian environment: Brownian last passage and the
continuous-time polymer, computed on paths discretized on a uniform grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import _kernels
from .env import replicate_seed
from .errors import InvalidArgumentError

LogWeight = float


@dataclass(frozen=True)
class BrownianGrid:
    """``m_lines`` independent Brownian motions on ``t_k = k * step``, k = 0..K.

    ``increments`` has shape (m_lines, K); ``cumulative`` has shape
    (m_lines, K + 1) with a leading zero column.  The effective step is
    ``t_horizon / K`` with ``K = ceil(t_horizon / requested step)``.
    """

    m_lines: int
    t_horizon: float
    step: float
    increments: np.ndarray
    cumulative: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.increments.shape[1]

    def coarsen(self, factor: int) -> "BrownianGrid":
        """Same paths observed on every ``factor``-th grid point."""
        if factor < 1 or self.n_steps % factor:
            raise InvalidArgumentError(f"cannot coarsen {self.n_steps} steps by {factor}")
        inc = self.increments.reshape(self.m_lines, -1, factor).sum(axis=2)
        return _grid_from_increments(inc, self.t_horizon)


def _grid_from_increments(inc: np.ndarray, t_horizon: float) -> BrownianGrid:
    cum = np.zeros((inc.shape[0], inc.shape[1] + 1))
    np.cumsum(inc, axis=1, out=cum[:, 1:])
    inc.setflags(write=False)
    cum.setflags(write=False)
    return BrownianGrid(inc.shape[0], float(t_horizon), float(t_horizon) / inc.shape[1], inc, cum)


def sample_grid(m_lines: int, t_horizon: float, step: float, seed: int) -> BrownianGrid:
    if m_lines < 1:
        raise InvalidArgumentError(f"m_lines must be >= 1, got {m_lines}")
    if not step > 0 or not t_horizon > 0 or step > t_horizon * (1 + 1e-12):
        raise InvalidArgumentError(f"need 0 < step <= t_horizon, got step={step}, t_horizon={t_horizon}")
    k = max(1, math.ceil(t_horizon / step - 1e-9))
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(m_lines), k]))
    inc = rng.standard_normal((m_lines, k)) * math.sqrt(t_horizon / k)
    return _grid_from_increments(inc, t_horizon)


def default_step(t_horizon: float, m_lines: int) -> float:
    return t_horizon / (50.0 * m_lines)


def last_passage_brownian(grid: BrownianGrid) -> float:
    """L(N, M) with jump times restricted to grid points."""
    if grid.n_steps < 1:
        raise InvalidArgumentError("empty grid")
    return float(_kernels.brownian_last_passage(np.ascontiguousarray(grid.cumulative)))


def last_passage_extrapolated(grid: BrownianGrid, factor: int = 4) -> float:
    """Grid last passage with the leading sqrt(step) bias removed.

    Grid restriction costs each jump O(sqrt(step)).  L is evaluated on the
    grid and on its ``factor``-coarsening (same paths) and the two are
    combined by Richardson extrapolation in sqrt(step).
    """
    fine = last_passage_brownian(grid)
    coarse = last_passage_brownian(grid.coarsen(factor))
    r = math.sqrt(factor)
    return (r * fine - coarse) / (r - 1.0)


def log_continuous_volume(t_horizon: float, m_jumps: int) -> float:
    """log of the Lebesgue measure t^M / M! of the jump-time simplex."""
    return m_jumps * math.log(t_horizon) - math.lgamma(m_jumps + 1)


def log_partition_brownian(grid: BrownianGrid, beta: float, normalized: bool = True) -> LogWeight:
    """log Z^Br_beta(N, M), M = m_lines - 1, by left-endpoint quadrature.

    ``normalized`` divides by the simplex volume N^M / M!.
    """
    beta = float(beta)
    if not math.isfinite(beta):
        raise InvalidArgumentError(f"beta must be finite, got {beta}")
    if grid.n_steps < 1:
        raise InvalidArgumentError("empty grid")
    value = float(_kernels.brownian_log_partition(np.ascontiguousarray(grid.cumulative), beta,
                                                  math.log(grid.step)))
    if normalized:
        value -= log_continuous_volume(grid.t_horizon, grid.m_lines - 1)
    return value


def sample_last_passage(m_lines: int, t_horizon: float, n_steps: int, reps: int, seed: int,
                        extrapolate: bool = False) -> np.ndarray:
    out = np.empty(reps)
    step = t_horizon / n_steps
    for r in range(reps):
        grid = sample_grid(m_lines, t_horizon, step, replicate_seed(seed, r))
        out[r] = last_passage_extrapolated(grid) if extrapolate else last_passage_brownian(grid)
    return out


def scaling_check(m_lines: int, n: float, reps: int, seed: int, steps_per_horizon: int = 400) -> float:
    """Two-sample KS distance between L(n, M) and sqrt(n) L(1, M).

    Both sides use the same number of grid steps per horizon, so the identity
    holds exactly in law on the grid as well.
    """
    if reps < 100:
        raise InvalidArgumentError(f"scaling_check needs reps >= 100, got {reps}")
    direct = sample_last_passage(m_lines, n, steps_per_horizon, reps, replicate_seed(seed, 1))
    scaled = math.sqrt(n) * sample_last_passage(m_lines, 1.0, steps_per_horizon, reps, replicate_seed(seed, 2))
    return float(stats.ks_2samp(direct, scaled).statistic)
