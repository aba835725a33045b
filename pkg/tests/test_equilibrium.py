import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import GOLDEN, PHI1_UNIT
from kylelab.equilibrium import (
    build_quote,
    insider_lambda,
    kyle_lambda,
    mm_insider_phi,
    mm_insider_radicand,
    mm_strategic_phi,
    strategic_lambda,
)
from kylelab.errors import DegenerateMarket
from kylelab.model import ModelKind, ModelParams

positive = st.floats(min_value=0.05, max_value=20.0, allow_nan=False)


def mp_phi(mu, g, s, r, i):
    """Intercept from the closed form in 40-digit arithmetic."""
    mp.mp.dps = 40
    mu, g, s, r = map(mp.mpf, (mu, g, s, r))
    h = r * g * g / 2
    lam = h + mp.sqrt(h * h + g * g / (s * s))
    rad = r * r * g * g + 2 * r * g * g / (lam * s * s) * mp.log(g / (lam * s))
    return float(mu - (-1) ** i / r * mp.sqrt(rad))


class TestLambda:
    def test_unit_values(self, unit_params):
        assert insider_lambda(unit_params) == pytest.approx(GOLDEN, abs=1e-15)
        assert kyle_lambda(unit_params) == 1.0
        assert strategic_lambda(unit_params) == 0.5

    @given(g=positive, s=positive, r=st.floats(min_value=0.0, max_value=20.0))
    @settings(max_examples=60, deadline=None)
    def test_quadratic_root(self, g, s, r):
        lam = insider_lambda(ModelParams(gamma=g, sigma=s, rho=r))
        resid = lam * lam - r * g * g * lam - g * g / (s * s)
        assert abs(resid) <= 1e-12 * max(lam * lam, 1.0)
        assert lam >= g / s * (1 - 1e-15)

    def test_kyle_limit(self):
        p = ModelParams(gamma=1.3, sigma=0.4, rho=0.0)
        assert abs(insider_lambda(p) - kyle_lambda(p)) < 1e-15

    def test_strategic_needs_rho(self):
        with pytest.raises(DegenerateMarket):
            strategic_lambda(ModelParams(rho=0.0))


class TestIntercepts:
    def test_unit_branch_values(self, unit_params):
        assert mm_insider_phi(unit_params, 1) == pytest.approx(PHI1_UNIT, abs=1e-14)
        assert mm_insider_phi(unit_params, 2) == pytest.approx(-PHI1_UNIT, abs=1e-14)

    @pytest.mark.parametrize("args", [(0.3, 2.0, 0.5, 0.7), (-1.0, 0.5, 3.0, 2.0), (0.0, 1.0, 1.0, 1e-3), (2.0, 1.0, 0.1, 50.0)])
    @pytest.mark.parametrize("i", [1, 2])
    def test_against_mpmath(self, args, i):
        mu, g, s, r = args
        got = mm_insider_phi(ModelParams(mu=mu, gamma=g, sigma=s, rho=r), i)
        assert got == pytest.approx(mp_phi(mu, g, s, r, i), rel=1e-11, abs=1e-13)

    @given(g=positive, s=positive, r=positive)
    @settings(max_examples=60, deadline=None)
    def test_radicand_nonnegative(self, g, s, r):
        assert mm_insider_radicand(ModelParams(gamma=g, sigma=s, rho=r)) >= -1e-12 * r * r * g * g

    def test_rho_zero_is_mu(self):
        assert mm_insider_phi(ModelParams(mu=0.4, rho=0.0), 1) == 0.4

    def test_strategic_symmetric(self, odd_params):
        d1 = mm_strategic_phi(odd_params, 1) - odd_params.mu
        d2 = mm_strategic_phi(odd_params, 2) - odd_params.mu
        assert d1 == pytest.approx(-d2, rel=1e-15)
        assert d2 == pytest.approx(0.7 * 0.5 * 4.0 / (2 * math.sqrt(3)), rel=1e-15)


class TestQuotes:
    @pytest.mark.parametrize("kind", list(ModelKind))
    @pytest.mark.parametrize("branch", [1, 2])
    def test_finite_profit_condition(self, kind, branch, odd_params):
        q = build_quote(odd_params, kind, branch)
        assert q.satisfies_c1()
        assert q.satisfies_c2(odd_params.mu, kind.informed)

    def test_boundary_cases(self, unit_params):
        # market makers and competitive agents facing an uninformed trader sit on 2 lambda(1)/lambda(1-) = (1 + c1)^2
        assert build_quote(unit_params, "ca-insider").c1_margin == pytest.approx(1.0, abs=1e-15)
        assert build_quote(unit_params, "ca-strategic").is_boundary()
        assert build_quote(unit_params, "mm-insider", 1).is_boundary()
        assert build_quote(unit_params, "mm-strategic", 2).is_boundary()

    def test_ca_strategic_layout(self, odd_params):
        q = build_quote(odd_params, "ca-strategic")
        assert (q.c0, q.c1) == (-odd_params.mu, 1.0)
        assert q.lambda_final == 2 * q.lambda_pre

    def test_mm_final_is_half(self, odd_params):
        for kind in ("mm-insider", "mm-strategic"):
            q = build_quote(odd_params, kind, 2)
            assert q.lambda_final == q.lambda_pre / 2 and q.p0 == q.phi

    def test_degenerate(self):
        with pytest.raises(DegenerateMarket):
            build_quote(ModelParams(rho=0.0), "mm-strategic")

    def test_depth_grid(self):
        g = np.logspace(-1, 1, 5)
        for gamma in g:
            for sigma in g:
                p = ModelParams(gamma=gamma, sigma=sigma, rho=0.0)
                assert abs(build_quote(p, "ca-insider").lambda_pre - gamma / sigma) < 1e-12
