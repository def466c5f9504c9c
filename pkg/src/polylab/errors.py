"""Exception hierarchy shared by every polylab module."""


class PolylabError(Exception):
    """Base class for all library errors."""


class InvalidShapeError(PolylabError, ValueError):
    pass


class InvalidArgumentError(PolylabError, ValueError):
    pass


class DomainError(PolylabError, ValueError):
    """Argument outside the domain where a quantity is finite."""


class OutOfBoundsError(PolylabError, IndexError):
    pass


class DataError(PolylabError, ValueError):
    """Field data is unusable (NaN, empty sample, ...)."""


class BudgetError(PolylabError):
    """Work requested exceeds a configured budget (path count, time, memory)."""


class NumericError(PolylabError, ArithmeticError):
    """An iterative numerical routine failed to converge."""


class UnsupportedDistributionError(PolylabError, ValueError):
    pass


class CatalogError(PolylabError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown experiment"
