"""Directed polymers and last-passage percolation near an axis: lattice and
Brownian models, edge laws, couplings and replicate experiments."""

from .env import DistSpec, EnvField, generate_field, log_mgf, replicate_seed
from .errors import (BudgetError, CatalogError, DataError, DomainError, InvalidArgumentError,
                     InvalidShapeError, NumericError, OutOfBoundsError, PolylabError,
                     UnsupportedDistributionError)
from .lpp import passage_profile, passage_time, passage_time_d
from .polymer import (ScalingRegime, log_partition, log_partition_d, mo_free_energy_exact,
                      mo_regime_estimate)

__version__ = "0.1.0"

__all__ = [
    "BudgetError", "CatalogError", "DataError", "DistSpec", "DomainError", "EnvField",
    "InvalidArgumentError", "InvalidShapeError", "NumericError", "OutOfBoundsError", "PolylabError",
    "ScalingRegime", "UnsupportedDistributionError", "generate_field", "log_mgf", "log_partition",
    "log_partition_d", "mo_free_energy_exact", "mo_regime_estimate", "passage_profile", "passage_time",
    "passage_time_d", "replicate_seed",
]
