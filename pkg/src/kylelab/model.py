"""Model primitives: parameters, model taxonomy and the market adjusted risk aversion."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError


class ModelKind(enum.Enum):
    KYLE = "kyle"
    CA_INSIDER = "ca-insider"
    CA_STRATEGIC = "ca-strategic"
    MM_INSIDER = "mm-insider"
    MM_STRATEGIC = "mm-strategic"

    @property
    def informed(self) -> bool:
        """True when the strategic trader knows V."""
        return self in (ModelKind.KYLE, ModelKind.CA_INSIDER, ModelKind.MM_INSIDER)

    @property
    def market_makers(self) -> bool:
        return self in (ModelKind.MM_INSIDER, ModelKind.MM_STRATEGIC)

    @property
    def branched(self) -> bool:
        return self.market_makers

    @classmethod
    def parse(cls, value) -> "ModelKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for kind in cls:
            if kind.value == key or kind.name.lower().replace("_", "-") == key:
                return kind
        raise ValueError(f"unknown model kind: {value!r}")


@dataclass(frozen=True)
class Branch:
    """Equilibrium index i of the market-maker models; enters formulas as (-1)**i."""

    index: int = 1

    def __post_init__(self):
        if self.index not in (1, 2):
            raise DomainError("branch", f"branch index must be 1 or 2, got {self.index!r}")

    @property
    def sign(self) -> int:
        return -1 if self.index == 1 else 1


@dataclass(frozen=True)
class ModelParams:
    """Primitives of the market.

    mu, gamma: mean and standard deviation of the fundamental value V.
    sigma: volatility of the noise traders' cumulative demand Z = sigma * B.
    rho: common CARA risk aversion of the liquidity providers.
    """

    mu: float = 0.0
    gamma: float = 1.0
    sigma: float = 1.0
    rho: float = 1.0

    def replace(self, **changes) -> "ModelParams":
        values = {"mu": self.mu, "gamma": self.gamma, "sigma": self.sigma, "rho": self.rho}
        values.update(changes)
        return ModelParams(**values)

    def as_dict(self) -> dict:
        return {"mu": self.mu, "gamma": self.gamma, "sigma": self.sigma, "rho": self.rho}


def validate(params: ModelParams) -> ModelParams:
    """Return ``params`` unchanged, or raise DomainError naming the first bad field."""
    for name in ("mu", "gamma", "sigma", "rho"):
        value = getattr(params, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise DomainError(name, f"{name} must be a finite real, got {value!r}")
    if params.gamma <= 0:
        raise DomainError("gamma", f"gamma must be > 0, got {params.gamma}")
    if params.sigma <= 0:
        raise DomainError("sigma", f"sigma must be > 0, got {params.sigma}")
    if params.rho < 0:
        raise DomainError("rho", f"rho must be >= 0, got {params.rho}")
    return params


def market_adjusted_risk_aversion(params: ModelParams) -> float:
    """rho_M = rho * gamma * sigma, the dimensionless risk parameter."""
    return params.rho * params.gamma * params.sigma


def params_from_rho_m(rho_m: float, gamma: float = 1.0, sigma: float = 1.0, mu: float = 0.0) -> ModelParams:
    """Parameters with the given rho_M at fixed (gamma, sigma)."""
    return validate(ModelParams(mu=mu, gamma=gamma, sigma=sigma, rho=rho_m / (gamma * sigma)))
