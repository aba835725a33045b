"""Kyle-type insider trading with risk-averse liquidity providers.

Closed-form equilibria for competitive agents and Bertrand market makers facing an
insider or an uninformed strategic trader, exact path simulation, market-quality
metrics and a Monte Carlo verification harness.
"""

from .equilibrium import EquilibriumQuote, build_quote, insider_lambda, kyle_lambda, strategic_lambda
from .errors import (
    DegenerateMarket,
    DomainError,
    HeavyTail,
    InfiniteProfit,
    KyleLabError,
    NumericalDomain,
    SingularTime,
)
from .model import Branch, ModelKind, ModelParams, market_adjusted_risk_aversion, params_from_rho_m, validate
from .simulate import EulerOracle, ExactTransition, PathBundle, SimConfig, View

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "DegenerateMarket",
    "DomainError",
    "EquilibriumQuote",
    "EulerOracle",
    "ExactTransition",
    "HeavyTail",
    "InfiniteProfit",
    "KyleLabError",
    "ModelKind",
    "ModelParams",
    "NumericalDomain",
    "PathBundle",
    "SimConfig",
    "SingularTime",
    "View",
    "build_quote",
    "insider_lambda",
    "kyle_lambda",
    "market_adjusted_risk_aversion",
    "params_from_rho_m",
    "strategic_lambda",
    "validate",
]
