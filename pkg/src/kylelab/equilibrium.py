"""Closed-form equilibrium quotes for the five model kinds.

A quote is the linear pricing rule P_t = phi + lambda_pre * Y_t on [0, 1) together
with the rule for the terminal bulk trade: the intercept jumps by c1 * P_{1-} + c0
and the bulk order is priced with slope lambda_final.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import DegenerateMarket, DomainError, NumericalDomain
from .model import Branch, ModelKind, ModelParams, validate


@dataclass(frozen=True)
class EquilibriumQuote:
    lambda_pre: float
    lambda_final: float
    phi: float
    c0: float = 0.0
    c1: float = 0.0
    p0: float = 0.0

    def __post_init__(self):
        if not self.lambda_pre > 0:
            raise DomainError("lambda_pre", f"lambda_pre must be > 0, got {self.lambda_pre}")
        if not self.lambda_final > 0:
            raise DomainError("lambda_final", f"lambda_final must be > 0, got {self.lambda_final}")

    @property
    def c1_margin(self) -> float:
        """2 lambda(1) / lambda(1-) - (1 + c1)^2; negative means unbounded profit."""
        return 2.0 * self.lambda_final / self.lambda_pre - (1.0 + self.c1) ** 2

    def satisfies_c1(self, tol: float = 1e-12) -> bool:
        return self.c1_margin >= -tol

    def is_boundary(self, tol: float = 1e-12) -> bool:
        return abs(self.c1_margin) <= tol

    def satisfies_c2(self, mu: float, informed: bool, tol: float = 1e-12) -> bool:
        if not self.is_boundary(tol):
            return True
        if informed:
            return abs(self.c0) <= tol and abs(self.c1) <= tol
        return abs(self.c0 + mu * self.c1) <= tol * max(1.0, abs(mu))

    def as_dict(self) -> dict:
        return asdict(self)


def kyle_lambda(params: ModelParams) -> float:
    return params.gamma / params.sigma


def insider_lambda(params: ModelParams) -> float:
    """Slope shared by both insider equilibria: the positive root of
    lambda^2 - rho gamma^2 lambda - gamma^2 / sigma^2 = 0."""
    half = params.rho * params.gamma**2 / 2.0
    return half + math.sqrt(half * half + (params.gamma / params.sigma) ** 2)


def strategic_lambda(params: ModelParams) -> float:
    """Pre-terminal slope rho gamma^2 / 2 of the uninformed-trader equilibria."""
    if params.rho <= 0:
        raise DegenerateMarket("uninformed strategic trader equilibria need rho > 0")
    return params.rho * params.gamma**2 / 2.0


def mm_insider_radicand(params: ModelParams) -> float:
    lam = insider_lambda(params)
    g, s, r = params.gamma, params.sigma, params.rho
    # log(gamma / (lam sigma)) = -log(1 + lam rho sigma^2) / 2, which keeps precision at small rho
    log_ratio = -0.5 * math.log1p(lam * r * s * s)
    return r * r * g * g + 2.0 * r * g * g / (lam * s * s) * log_ratio


def mm_insider_phi(params: ModelParams, branch: Branch | int = 1) -> float:
    branch = branch if isinstance(branch, Branch) else Branch(branch)
    if params.rho == 0:
        return params.mu
    radicand = mm_insider_radicand(params)
    if radicand < 0:
        if radicand < -1e-12 * params.rho**2 * params.gamma**2:
            raise NumericalDomain(f"negative radicand {radicand!r} in the market-maker intercept")
        radicand = 0.0
    return params.mu - branch.sign / params.rho * math.sqrt(radicand)


def mm_strategic_phi(params: ModelParams, branch: Branch | int = 1) -> float:
    branch = branch if isinstance(branch, Branch) else Branch(branch)
    return branch.sign * params.rho * params.sigma * params.gamma**2 / (2.0 * math.sqrt(3.0)) + params.mu


def build_quote(params: ModelParams, kind: ModelKind | str, branch: Branch | int = 1) -> EquilibriumQuote:
    validate(params)
    kind = ModelKind.parse(kind)
    branch = branch if isinstance(branch, Branch) else Branch(branch)
    mu = params.mu
    if kind is ModelKind.KYLE:
        lam = kyle_lambda(params)
        return EquilibriumQuote(lam, lam, mu, 0.0, 0.0, mu)
    if kind is ModelKind.CA_INSIDER:
        lam = insider_lambda(params)
        return EquilibriumQuote(lam, lam, mu, 0.0, 0.0, mu)
    if kind is ModelKind.CA_STRATEGIC:
        lam0 = strategic_lambda(params)
        return EquilibriumQuote(lam0, 2.0 * lam0, mu, -mu, 1.0, mu)
    if kind is ModelKind.MM_INSIDER:
        lam = insider_lambda(params)
        phi = mm_insider_phi(params, branch)
        return EquilibriumQuote(lam, lam / 2.0, phi, 0.0, 0.0, phi)
    if kind is ModelKind.MM_STRATEGIC:
        lam0 = strategic_lambda(params)
        phi = mm_strategic_phi(params, branch)
        return EquilibriumQuote(lam0, lam0 / 2.0, phi, 0.0, 0.0, phi)
    raise ValueError(f"unsupported kind {kind}")
