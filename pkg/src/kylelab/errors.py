"""Exception types shared across the package."""


class KyleLabError(Exception):
    """Base class for all package errors."""


class DomainError(KyleLabError, ValueError):
    """A model parameter violates its domain (e.g. ``sigma <= 0``)."""

    def __init__(self, field, message=None):
        self.field = field
        super().__init__(message or f"invalid value for {field}")


class DegenerateMarket(KyleLabError, ValueError):
    """The requested equilibrium does not exist for these parameters (e.g. rho = 0
    with an uninformed strategic trader)."""


class NumericalDomain(KyleLabError, ArithmeticError):
    """A square root or logarithm argument fell outside its domain beyond tolerance."""


class SingularTime(KyleLabError, ValueError):
    """A drift or score was requested at a time where it is singular."""


class InfiniteProfit(KyleLabError, ValueError):
    """The quote lets a strategic trader extract unbounded profit."""


class HeavyTail(KyleLabError, RuntimeError):
    """Too many exponential-utility samples had to be clamped."""
