"""I.i.d. environment fields with reproducible, row-addressable generation.

A field lives on a box ``{0..n0-1} x {0..n1-1} x ...``.  Coordinate 0 is the
long ("time") axis; every other coordinate tuple indexes a *row*, a vector
along coordinate 0.  Each row is drawn from its own counter-based Philox
stream keyed by ``(seed, row coordinates)``, so any row can be materialized
on its own and fields with the same seed agree on the overlap of their boxes.
"""

from __future__ import annotations

import enum
import math
from typing import Sequence

import numpy as np

from .errors import DataError, DomainError, InvalidShapeError, OutOfBoundsError

_SQRT3 = math.sqrt(3.0)


class DistSpec(str, enum.Enum):
    """Centered, unit-variance environment laws."""

    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    CENTERED_EXPONENTIAL = "centered_exponential"
    CENTERED_UNIFORM = "centered_uniform"

    @classmethod
    def parse(cls, value) -> "DistSpec":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            valid = ", ".join(d.value for d in cls)
            raise DomainError(f"unknown distribution {value!r}; valid: {valid}") from None

    @property
    def beta_max(self) -> float:
        """Supremum of the beta range where the log-MGF is finite."""
        return 1.0 if self is DistSpec.CENTERED_EXPONENTIAL else math.inf

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self is DistSpec.GAUSSIAN:
            return rng.standard_normal(size)
        if self is DistSpec.RADEMACHER:
            return np.where(rng.random(size) < 0.5, -1.0, 1.0)
        if self is DistSpec.CENTERED_EXPONENTIAL:
            return rng.standard_exponential(size) - 1.0
        return (2.0 * rng.random(size) - 1.0) * _SQRT3


def log_mgf(dist, beta: float) -> float:
    """lambda(beta) = log E[exp(beta * eta)] in closed form."""
    dist = DistSpec.parse(dist)
    beta = float(beta)
    if not beta < dist.beta_max:
        raise DomainError(f"log_mgf({dist.value}) requires beta < {dist.beta_max}, got {beta}")
    if dist is DistSpec.GAUSSIAN:
        return 0.5 * beta * beta
    if dist is DistSpec.RADEMACHER:
        b = abs(beta)
        return b + math.log1p(math.exp(-2.0 * b)) - math.log(2.0)
    if dist is DistSpec.CENTERED_EXPONENTIAL:
        return -beta - math.log1p(-beta)
    x = abs(beta) * _SQRT3
    if x < 1e-3:
        x2 = x * x
        return x2 / 6.0 - x2 * x2 / 180.0
    # log(sinh(x)/x) without overflow for large x
    return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0 * x)


def _row_rng(seed: int, row: tuple) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *map(int, row)])
    return np.random.Generator(np.random.Philox(ss))


class EnvField:
    """Immutable environment on a finite lattice box.

    Either seeded (values derived from ``(seed, dist, coordinate)``) or backed
    by an explicit array, which is how tests pin hand-made environments.
    """

    def __init__(self, shape: Sequence[int], dist=DistSpec.GAUSSIAN, seed: int = 0,
                 values: np.ndarray | None = None):
        shape = tuple(int(s) for s in shape)
        if len(shape) < 1 or any(s < 1 for s in shape):
            raise InvalidShapeError(f"all extents must be >= 1, got {shape}")
        self.shape = shape
        self.dist = DistSpec.parse(dist)
        self.seed = int(seed)
        if values is not None:
            values = np.array(values, dtype=float)
            values.setflags(write=False)
            if values.shape != shape:
                raise InvalidShapeError(f"values shape {values.shape} != {shape}")
        self._values = values

    @classmethod
    def from_array(cls, values) -> "EnvField":
        values = np.asarray(values, dtype=float)
        return cls(values.shape, values=values)

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def explicit(self) -> bool:
        return self._values is not None

    def contains(self, coords: Sequence[int]) -> bool:
        return len(coords) == self.ndim and all(0 <= c < s for c, s in zip(coords, self.shape))

    def row(self, *xs: int, length: int | None = None) -> np.ndarray:
        """Values ``eta(0..length-1, xs)`` along coordinate 0."""
        if len(xs) != self.ndim - 1:
            raise OutOfBoundsError(f"row needs {self.ndim - 1} coordinates, got {len(xs)}")
        if not all(0 <= x < s for x, s in zip(xs, self.shape[1:])):
            raise OutOfBoundsError(f"row {xs} outside field of shape {self.shape}")
        n = self.shape[0] if length is None else int(length)
        if not 0 <= n <= self.shape[0]:
            raise OutOfBoundsError(f"row length {n} exceeds extent {self.shape[0]}")
        if self._values is not None:
            out = np.array(self._values[(slice(0, n),) + tuple(xs)])
            if np.isnan(out).any():
                raise DataError(f"NaN in field row {xs}")
            return out
        return self.dist.sample(_row_rng(self.seed, xs), n)

    def __getitem__(self, coords) -> float:
        coords = tuple(coords) if isinstance(coords, tuple) else (coords,)
        if not self.contains(coords):
            raise OutOfBoundsError(f"{coords} outside field of shape {self.shape}")
        if self._values is not None:
            return float(self._values[coords])
        return float(self.row(*coords[1:], length=coords[0] + 1)[-1])

    def to_array(self) -> np.ndarray:
        """Materialize the whole box (small fields only)."""
        if self._values is not None:
            return np.array(self._values)
        out = np.empty(self.shape)
        for xs in np.ndindex(*self.shape[1:]):
            out[(slice(None),) + xs] = self.row(*xs)
        return out


def generate_field(dist, shape: Sequence[int], seed: int) -> EnvField:
    return EnvField(shape, dist=dist, seed=seed)


def replicate_seed(master: int, index: int) -> int:
    """Seed of replicate ``index`` under master seed ``master``.

    Mixing is SeedSequence hashing of the pair, so nearby masters do not share
    replicate streams (unlike ``master ^ index``).
    """
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFFFFFFFFFF, int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])

