"""Discrete last-passage percolation on directed lattice paths.

The energy of a path is the sum of the environment over the sites it visits,
excluding the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ._sweep import check_endpoint, planar_rows, sweep
from .env import EnvField
from .errors import BudgetError, OutOfBoundsError


def log_path_count(end: Sequence[int]) -> float:
    """log of the number of directed paths to ``end`` (a multinomial coefficient)."""
    end = [int(c) for c in end]
    return math.lgamma(sum(end) + 1) - sum(math.lgamma(c + 1) for c in end)


def passage_time(field: EnvField, end: Sequence[int]) -> float:
    """T(N, M): maximal path energy from the origin to ``end`` in the plane."""
    if field.ndim != 2 or len(end) != 2:
        raise OutOfBoundsError("passage_time is planar; use passage_time_d in higher dimension")
    return sweep(field, end)


def passage_time_d(field: EnvField, end: Sequence[int]) -> float:
    """Last-passage time in d+1 dimensions (``len(end) == d + 1``)."""
    return sweep(field, end)


@dataclass(frozen=True)
class PassageProfile:
    """T(n, N - n) for n = 1..N on one field realization (``values[n - 1]``)."""

    n_total: int
    values: np.ndarray

    def __getitem__(self, n: int) -> float:
        if not 1 <= n <= self.n_total:
            raise IndexError(n)
        return float(self.values[n - 1])


def passage_profile(field: EnvField, n_total: int) -> PassageProfile:
    n_total = int(n_total)
    values = np.empty(n_total)
    for m, v in planar_rows(field, n_total, n_total - 1):
        values[n_total - m - 1] = v
    return PassageProfile(n_total, values)


def iter_paths(end: Sequence[int]) -> Iterator[list]:
    """All directed paths to ``end`` as site lists (origin excluded)."""
    end = tuple(int(c) for c in end)
    d = len(end)

    def rec(pos, path):
        if pos == end:
            yield list(path)
            return
        for i in range(d):
            if pos[i] < end[i]:
                nxt = pos[:i] + (pos[i] + 1,) + pos[i + 1:]
                path.append(nxt)
                yield from rec(nxt, path)
                path.pop()

    yield from rec((0,) * d, [])


def path_energies(field: EnvField, end: Sequence[int], max_paths: int = 10**6) -> np.ndarray:
    """Energies of every directed path to ``end``, by explicit enumeration."""
    end = check_endpoint(field, end)
    if log_path_count(end) > math.log(max_paths) + 1e-9:
        raise BudgetError(
            f"{math.exp(log_path_count(end)):.3g} paths to {end} exceeds the budget of {max_paths}")
    values = field.to_array()
    return np.array([sum(values[s] for s in path) for path in iter_paths(end)])


def passage_time_bruteforce(field: EnvField, end: Sequence[int], max_paths: int = 10**6) -> float:
    return float(path_energies(field, end, max_paths).max())
