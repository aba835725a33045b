"""Closed-form market-quality measures and the comparative-dynamics functions.

Every normalised quantity divides by its Kyle counterpart: depth by 1/lambda_K =
sigma/gamma, efficiency by gamma^2 (1 - t), profit by gamma sigma.  All of them then
depend on the primitives only through rho_M = rho gamma sigma.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .equilibrium import (
    EquilibriumQuote,
    build_quote,
    insider_lambda,
    kyle_lambda,
    mm_insider_phi,
    strategic_lambda,
)
from .errors import DegenerateMarket, InfiniteProfit
from .model import Branch, ModelKind, ModelParams, market_adjusted_risk_aversion, params_from_rho_m, validate

SMALL_X = 1e-3

# x -> 0 expansions of v and Delta (coefficients of x^0 .. x^6)
_V_SERIES = (1.0, -1.0 / 12, -1.0 / 24, 1.0 / 24, -7.0 / 1920, -1.0 / 240, 23.0 / 35840)
_DELTA_SERIES = (0.0, 1.0 / 4, -1.0 / 6, 1.0 / 24, 1.0 / 240, -1.0 / 240, -3.0 / 8960)


def _poly(coeffs, x):
    out = np.zeros_like(x)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _ret(arr, scalar):
    return float(arr) if scalar else arr


# -- Table 3 footnote functions ------------------------------------------------------


def delta0(x):
    """x log x - x + 1 (>= 0, zero at x = 1)."""
    arr, scalar = _as_array(x)
    return _ret(np.where(arr > 0, arr * np.log(np.where(arr > 0, arr, 1.0)), 0.0) - arr + 1.0, scalar)


def u_of(x):
    """1 - 2 / (1 + sqrt(1 + 4/x^2)), written as 4 / (x^2 (1 + s)^2) to avoid cancellation."""
    arr, scalar = _as_array(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.sqrt(1.0 + 4.0 / (arr * arr))
        out = 4.0 / (arr * arr * (1.0 + s) ** 2)
    return _ret(np.where(arr == 0, 1.0, out), scalar)


def v_of(x):
    arr, scalar = _as_array(x)
    small = np.abs(arr) < SMALL_X
    safe = np.where(small, 1.0, arr)
    u = u_of(safe)
    direct = (u * np.log(u) + (1.0 + 7.0 * u - 8.0 * u * u) / (3.0 * u)) / (2.0 * safe)
    return _ret(np.where(small, _poly(_V_SERIES, arr), direct), scalar)


def pi_of(x):
    arr, scalar = _as_array(x)
    return _ret(arr / 3.0 + v_of(arr), scalar)


def delta_of(x):
    """Additional insider profit (normalised) from trading with market makers."""
    arr, scalar = _as_array(x)
    small = np.abs(arr) < SMALL_X
    safe = np.where(small, 1.0, arr)
    direct = delta0(u_of(safe)) / (2.0 * safe)
    return _ret(np.where(small, _poly(_DELTA_SERIES, arr), direct), scalar)


def table3_functions(x):
    """(u, v, pi, Delta0(u), Delta) at x = rho_M > 0."""
    u = u_of(x)
    return u, v_of(x), pi_of(x), delta0(u), delta_of(x)


# -- depth, efficiency, reversal -----------------------------------------------------


def depth(kind, params: ModelParams) -> float:
    """1 / lambda on [0, 1) as tabulated."""
    kind = ModelKind.parse(kind)
    validate(params)
    rm = market_adjusted_risk_aversion(params)
    if kind is ModelKind.KYLE:
        return 1.0 / kyle_lambda(params)
    if kind.informed:
        return 1.0 / kyle_lambda(params) / (rm / 2.0 + math.sqrt(rm * rm / 4.0 + 1.0))
    if params.rho <= 0:
        raise DegenerateMarket("uninformed strategic trader equilibria need rho > 0")
    return 2.0 / (params.rho * params.gamma**2)


def relative_depth(rho_m):
    """gamma / (lambda sigma) for the insider equilibria."""
    arr, scalar = _as_array(rho_m)
    return _ret(1.0 / (arr / 2.0 + np.sqrt(arr * arr / 4.0 + 1.0)), scalar)


def adverse_selection_share(params: ModelParams) -> float:
    """(lambda - lambda_0) / lambda, the informational part of price impact."""
    if params.rho <= 0:
        raise DegenerateMarket("lambda_0 is undefined at rho = 0")
    return adverse_selection_share_rm(market_adjusted_risk_aversion(params))


def adverse_selection_share_rm(rho_m):
    # (lam - lam0)/lam = sqrt(x^2/4 + 1) / (x/2 + sqrt(x^2/4 + 1))
    arr, scalar = _as_array(rho_m)
    root = np.sqrt(arr * arr / 4.0 + 1.0)
    return _ret(root / (arr / 2.0 + root), scalar)


def _eff_c(rm):
    # 2 lambda rho sigma^2 in units of rho_M: lambda sigma / gamma = rho_M / 2 + sqrt(rho_M^2 / 4 + 1)
    return rm * (rm + np.sqrt(rm * rm + 4.0))


def efficiency_Sigma(t, params: ModelParams):
    """Var(P_1 | market information at t) in the insider equilibria."""
    arr, scalar = _as_array(t)
    c = _eff_c(market_adjusted_risk_aversion(params))
    kyle = params.gamma**2 * (1.0 - arr)
    return _ret(kyle * (2.0 + c) / (2.0 + c * (1.0 - arr)), scalar)


def efficiency_variance_form(t, params: ModelParams):
    """Same quantity as lambda^2 sigma^2 (1 - t) / (1 + lambda rho sigma^2 (1 - t))."""
    arr, scalar = _as_array(t)
    lam = insider_lambda(params)
    s2 = params.sigma**2
    return _ret(lam * lam * s2 * (1.0 - arr) / (1.0 + lam * params.rho * s2 * (1.0 - arr)), scalar)


def relative_efficiency(t, rho_m):
    """Sigma(t) / Sigma_K(t); finite at t = 1 by continuity."""
    t_arr, _ = _as_array(t)
    c = _eff_c(np.asarray(rho_m, dtype=float))
    out = (2.0 + c) / (2.0 + c * (1.0 - t_arr))
    return out if np.ndim(out) else float(out)


def reversal_M(s, kind, params: ModelParams):
    """Signed reversal M(s) = sigma^2 a(s); its negation is the reversal intensity."""
    kind = ModelKind.parse(kind)
    arr, scalar = _as_array(s)
    rm = market_adjusted_risk_aversion(params)
    if kind is ModelKind.KYLE or rm == 0:
        return _ret(np.zeros_like(arr), scalar)
    if kind.informed:
        return _ret(-2.0 / (1.0 + math.sqrt(1.0 + 4.0 / rm**2) - 2.0 * arr), scalar)
    if kind is ModelKind.CA_STRATEGIC:
        return _ret(-(rm**2) / (4.0 + rm**2 * (1.0 - arr)), scalar)
    return _ret(np.full_like(arr, -(rm**2) / 4.0), scalar)


def reversal_intensity(s, kind, params: ModelParams):
    return -reversal_M(s, kind, params)


# -- profits and utilities -------------------------------------------------------------


def profits(kind, params: ModelParams, branch: Branch | int = 1) -> float:
    """Ex-ante expected profit of the strategic trader in the theorem's form."""
    kind = ModelKind.parse(kind)
    validate(params)
    g, s, r, mu = params.gamma, params.sigma, params.rho, params.mu
    if kind is ModelKind.KYLE:
        return g * s
    if kind is ModelKind.CA_INSIDER:
        lam = insider_lambda(params)
        return g * g / (2.0 * lam) + s * s * lam / 2.0
    if kind is ModelKind.MM_INSIDER:
        lam = insider_lambda(params)
        phi = mm_insider_phi(params, branch)
        return (phi - mu) ** 2 / (2.0 * lam) + g * g / (2.0 * lam) + lam * s * s / 2.0
    if r <= 0:
        raise DegenerateMarket("uninformed strategic trader equilibria need rho > 0")
    if kind is ModelKind.CA_STRATEGIC:
        return r * g * g * s * s / 4.0
    return r * g * g * s * s / 3.0


def profits_normalized(kind, rho_m):
    """Tabulated profit divided by gamma sigma."""
    kind = ModelKind.parse(kind)
    arr, scalar = _as_array(rho_m)
    if kind is ModelKind.KYLE:
        out = np.ones_like(arr)
    elif kind is ModelKind.CA_INSIDER:
        out = np.sqrt(1.0 + arr * arr / 4.0)
    elif kind is ModelKind.MM_INSIDER:
        out = pi_of(arr)
    elif kind is ModelKind.CA_STRATEGIC:
        out = arr / 4.0
    else:
        out = arr / 3.0
    return _ret(np.asarray(out, dtype=float), scalar)


def value_of_information(market: str, rho_m):
    """(insider profit - uninformed profit) / (gamma sigma) for 'ca' or 'mm'."""
    arr, scalar = _as_array(rho_m)
    if market == "ca":
        return _ret(np.sqrt(1.0 + arr * arr / 4.0) - arr / 4.0, scalar)
    if market == "mm":
        return _ret(v_of(arr), scalar)
    raise ValueError(f"market must be 'ca' or 'mm', got {market!r}")


def liquidity_utility(kind, params: ModelParams, branch: Branch | int = 1) -> float:
    """Expected CARA utility of the liquidity providers' terminal gain."""
    kind = ModelKind.parse(kind)
    validate(params)
    if params.rho == 0 or kind in (ModelKind.KYLE, ModelKind.MM_INSIDER, ModelKind.MM_STRATEGIC):
        return 0.0
    g, s, r = params.gamma, params.sigma, params.rho
    if kind is ModelKind.CA_INSIDER:
        lam = insider_lambda(params)
        return -math.expm1(math.log(lam * s / g) - lam * r * s * s / 2.0)
    lam = strategic_lambda(params)
    return -math.expm1(0.5 * math.log1p(lam * r * s * s / 2.0) - lam * r * s * s / 2.0)


def noise_pnl(kind, params: ModelParams, branch: Branch | int = 1) -> float:
    """Noise traders' expected P&L, -lambda sigma^2."""
    return -build_quote(params, kind, branch).lambda_pre * params.sigma**2


# -- terminal auction (finite-profit proposition) ---------------------------------------


def optimal_bulk_trade(P_pre, quote: EquilibriumQuote, tilde_v):
    """Optimal order at t = 1 given the pre-auction price and the trader's valuation."""
    if not quote.satisfies_c1():
        raise InfiniteProfit(
            f"2 lambda(1)/lambda(1-) = {2 * quote.lambda_final / quote.lambda_pre:.6g} < (1 + c1)^2"
        )
    return (tilde_v - quote.c0 - (1.0 + quote.c1) * P_pre) / (2.0 * quote.lambda_final)


def psi_value(t, y, quote: EquilibriumQuote, tilde_v, Y_anchor=0.0, P_anchor=None, sigma: float = 1.0):
    """Value function (lambda (y - Y_a) + P_a - V~)^2 / (2 lambda) + sigma^2 lambda (1 - t) / 2."""
    lam = quote.lambda_pre
    p_a = quote.p0 if P_anchor is None else P_anchor
    return (lam * (y - Y_anchor) + p_a - tilde_v) ** 2 / (2.0 * lam) + sigma**2 * lam * (1.0 - t) / 2.0


# -- report ----------------------------------------------------------------------------


@dataclass
class MetricsReport:
    rho_M: float
    depth: float
    relative_depth: float
    adverse_selection_share: float
    profit_insider: float
    profit_strategic: float
    value_of_info_normalized: float
    utility_liquidity: float
    efficiency: object = field(repr=False, default=None)
    reversal: object = field(repr=False, default=None)

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("efficiency")
        d.pop("reversal")
        return d


def metrics_report(params: ModelParams, market: str = "ca", branch: Branch | int = 1) -> MetricsReport:
    """All closed-form measures of one market ('ca' or 'mm') with an insider."""
    insider = ModelKind.CA_INSIDER if market == "ca" else ModelKind.MM_INSIDER
    strategic = ModelKind.CA_STRATEGIC if market == "ca" else ModelKind.MM_STRATEGIC
    rm = market_adjusted_risk_aversion(params)
    return MetricsReport(
        rho_M=rm,
        depth=depth(insider, params),
        relative_depth=relative_depth(rm),
        adverse_selection_share=adverse_selection_share(params),
        profit_insider=profits(insider, params, branch),
        profit_strategic=profits(strategic, params, branch),
        value_of_info_normalized=value_of_information(market, rm),
        utility_liquidity=liquidity_utility(insider, params, branch),
        efficiency=lambda t: efficiency_Sigma(t, params),
        reversal=lambda s: reversal_M(s, insider, params),
    )


def interior_minimum(x, y) -> int | None:
    """Index of a strict interior grid minimum of y, or None if y is monotone there."""
    y = np.asarray(y)
    k = int(np.argmin(y))
    if 0 < k < len(y) - 1:
        return k
    return None


__all__ = [
    "adverse_selection_share",
    "adverse_selection_share_rm",
    "delta0",
    "delta_of",
    "depth",
    "efficiency_Sigma",
    "efficiency_variance_form",
    "interior_minimum",
    "liquidity_utility",
    "metrics_report",
    "MetricsReport",
    "noise_pnl",
    "optimal_bulk_trade",
    "params_from_rho_m",
    "pi_of",
    "profits",
    "profits_normalized",
    "psi_value",
    "relative_depth",
    "relative_efficiency",
    "reversal_M",
    "reversal_intensity",
    "table3_functions",
    "u_of",
    "v_of",
    "value_of_information",
]
