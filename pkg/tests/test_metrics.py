import math

import mpmath as mp
import numpy as np
import pytest

from conftest import CA_INSIDER_UTILITY, CA_STRATEGIC_UTILITY, PI_1
from kylelab import metrics
from kylelab.coefficients import market_coefficients
from kylelab.equilibrium import build_quote, insider_lambda
from kylelab.errors import DegenerateMarket, InfiniteProfit
from kylelab.equilibrium import EquilibriumQuote
from kylelab.model import ModelKind, ModelParams, params_from_rho_m

GRID = np.logspace(-2, 1, 200)


def mp_table3(x):
    mp.mp.dps = 50
    x = mp.mpf(x)
    u = 1 - 2 / (1 + mp.sqrt(1 + 4 / x**2))
    v = (u * mp.log(u) + (1 + 7 * u - 8 * u * u) / (3 * u)) / (2 * x)
    d0 = u * mp.log(u) - u + 1
    return float(u), float(v), float(x / 3 + v), float(d0), float(d0 / (2 * x))


class TestTable3Functions:
    @pytest.mark.parametrize("x", [1e-5, 3e-4, 9.9e-4, 1.01e-3, 0.01, 0.5, 1.0, 2.0, 10.0, 80.0])
    def test_against_mpmath(self, x):
        got = metrics.table3_functions(x)
        want = mp_table3(x)
        for g, w in zip(got, want):
            assert g == pytest.approx(w, rel=1e-9, abs=1e-15)

    def test_frozen(self):
        assert metrics.pi_of(1.0) == pytest.approx(PI_1, abs=1e-14)

    def test_limits(self):
        assert metrics.v_of(0.0) == 1.0 and metrics.delta_of(0.0) == 0.0 and metrics.u_of(0.0) == 1.0

    def test_identities_on_grid(self):
        ca = np.sqrt(1 + GRID**2 / 4)
        assert np.max(np.abs(metrics.pi_of(GRID) - ca - metrics.delta_of(GRID))) < 1e-8
        assert np.max(np.abs(metrics.pi_of(GRID) - GRID / 3 - metrics.v_of(GRID))) < 1e-14

    def test_delta_bounds(self):
        x = np.logspace(-3, 2, 500)
        d = metrics.delta_of(x)
        assert np.all(d > 0) and np.all(d / np.sqrt(1 + x * x / 4) < 1 / 3)

    def test_u_is_squared_relative_depth(self):
        for rm in (0.1, 1.0, 7.0):
            p = params_from_rho_m(rm, gamma=1.7, sigma=0.4)
            lam = insider_lambda(p)
            assert metrics.u_of(rm) == pytest.approx((p.gamma / (lam * p.sigma)) ** 2, rel=1e-12)


class TestProfits:
    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_theorem_equals_table(self, kind):
        for rm in GRID[::7]:
            p = params_from_rho_m(rm, gamma=1.3, sigma=0.6)
            got = metrics.profits(kind, p, 2) / (p.gamma * p.sigma)
            assert got == pytest.approx(metrics.profits_normalized(kind, rm), abs=1e-10)

    def test_branch_invariance(self, odd_params):
        assert metrics.profits("mm-insider", odd_params, 1) == pytest.approx(metrics.profits("mm-insider", odd_params, 2), rel=1e-14)

    def test_value_of_information(self):
        assert metrics.value_of_information("ca", 1.0) == pytest.approx(math.sqrt(1.25) - 0.25, abs=1e-15)
        with pytest.raises(ValueError):
            metrics.value_of_information("xx", 1.0)

    def test_interior_minima(self):
        x = np.logspace(-1, 2, 2000)
        for market, where in (("ca", 1.149), ("mm", 1.90)):
            k = metrics.interior_minimum(x, metrics.value_of_information(market, x))
            assert k is not None and x[k] == pytest.approx(where, rel=0.01)
        assert metrics.interior_minimum(x, x) is None

    def test_utilities(self, unit_params):
        assert metrics.liquidity_utility("ca-insider", unit_params) == pytest.approx(CA_INSIDER_UTILITY, abs=1e-14)
        assert metrics.liquidity_utility("ca-strategic", unit_params) == pytest.approx(CA_STRATEGIC_UTILITY, abs=1e-14)
        assert metrics.liquidity_utility("mm-insider", unit_params, 1) == 0.0
        assert metrics.liquidity_utility("ca-insider", ModelParams(rho=0.0)) == 0.0

    def test_noise_pnl_identical(self, odd_params):
        assert metrics.noise_pnl("ca-insider", odd_params) == metrics.noise_pnl("mm-insider", odd_params, 2)
        assert metrics.noise_pnl("kyle", ModelParams()) == -1.0


class TestDepthEfficiencyReversal:
    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_depth_is_inverse_slope(self, kind, odd_params):
        assert metrics.depth(kind, odd_params) == pytest.approx(1 / build_quote(odd_params, kind).lambda_pre, rel=1e-14)

    def test_depth_degenerate(self):
        with pytest.raises(DegenerateMarket):
            metrics.depth("ca-strategic", ModelParams(rho=0.0))

    def test_shares(self):
        x = np.logspace(-2, 2, 300)
        share = metrics.adverse_selection_share_rm(x)
        assert np.all((share > 0.5) & (share <= 1)) and np.all(np.diff(share) < 0)
        assert np.all(np.diff(metrics.relative_depth(x)) < 0)
        p = params_from_rho_m(0.8, gamma=2.0, sigma=0.4)
        lam, lam0 = insider_lambda(p), p.rho * p.gamma**2 / 2
        assert metrics.adverse_selection_share(p) == pytest.approx((lam - lam0) / lam, rel=1e-14)

    def test_efficiency_two_forms(self, odd_params):
        t = np.linspace(0, 1, 11)
        assert np.allclose(metrics.efficiency_Sigma(t, odd_params), metrics.efficiency_variance_form(t, odd_params), rtol=1e-13, atol=1e-15)
        assert metrics.efficiency_Sigma(0.5, ModelParams()) == pytest.approx(0.7236067977499789, abs=1e-12)

    def test_kyle_reduction(self):
        for g in np.logspace(-1, 1, 5):
            for s in np.logspace(-1, 1, 5):
                p = ModelParams(gamma=g, sigma=s, rho=0.0)
                t = np.linspace(0, 1, 5)
                assert np.max(np.abs(metrics.efficiency_Sigma(t, p) - g * g * (1 - t))) < 1e-12
                assert np.all(metrics.reversal_M(t, "ca-insider", p) == 0.0)

    @pytest.mark.parametrize("kind", [ModelKind.CA_INSIDER, ModelKind.MM_INSIDER, ModelKind.CA_STRATEGIC, ModelKind.MM_STRATEGIC])
    def test_reversal_is_scaled_mean_reversion(self, kind, odd_params):
        cs = market_coefficients(odd_params, kind, build_quote(odd_params, kind))
        s = np.linspace(0, 1, 9)
        assert np.allclose(metrics.reversal_M(s, kind, odd_params), odd_params.sigma**2 * cs.a(s), rtol=1e-13)

    def test_reversal_values(self):
        assert metrics.reversal_M(0.3, "mm-strategic", params_from_rho_m(2.0)) == pytest.approx(-1.0, abs=1e-15)
        assert metrics.reversal_M(0.5, "ca-insider", params_from_rho_m(1.0)) == pytest.approx(-2 / math.sqrt(5), abs=1e-15)
        assert metrics.reversal_intensity(0.5, "ca-insider", params_from_rho_m(1.0)) == pytest.approx(2 / math.sqrt(5))

    def test_relative_efficiency(self):
        rm, t = 1.3, np.linspace(0, 0.9, 4)
        p = params_from_rho_m(rm)
        assert np.allclose(metrics.relative_efficiency(t, rm), metrics.efficiency_Sigma(t, p) / (1 - t), rtol=1e-14)


class TestTerminalAuction:
    def test_infinite_profit(self):
        q = EquilibriumQuote(1.0, 0.4, 0.0)
        with pytest.raises(InfiniteProfit):
            metrics.optimal_bulk_trade(0.0, q, 1.0)

    def test_psi_solves_hjb(self, unit_params):
        # psi_t + sigma^2 psi_yy / 2 = 0 and psi_y = (P - V~) for the insider's value
        q = build_quote(unit_params, "ca-insider")
        h = 1e-4
        f = lambda t, y: metrics.psi_value(t, y, q, 0.7)
        t, y = 0.4, 0.2
        psi_t = (f(t + h, y) - f(t - h, y)) / (2 * h)
        psi_yy = (f(t, y + h) - 2 * f(t, y) + f(t, y - h)) / h**2
        assert psi_t + psi_yy / 2 == pytest.approx(0.0, abs=1e-6)
        assert f(1.0, (0.7 - q.p0) / q.lambda_pre) == 0.0

    def test_bulk_trade_maximises(self):
        q = EquilibriumQuote(1.5, 0.75, 0.2)
        p_pre, v = 0.4, 1.1
        d = metrics.optimal_bulk_trade(p_pre, q, v)
        gain = lambda x: (v - (p_pre + q.lambda_final * x)) * x
        assert gain(d) >= max(gain(d + 1e-3), gain(d - 1e-3))

    def test_metrics_report(self, unit_params):
        r = metrics.metrics_report(unit_params, "mm", 2)
        assert r.profit_insider == pytest.approx(PI_1, abs=1e-12)
        assert r.reversal(0.5) == pytest.approx(-2 / math.sqrt(5))
        assert "efficiency" not in r.as_dict()
