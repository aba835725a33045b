import json
import math

import numpy as np
import pytest

from kylelab import verify
from kylelab.coefficients import market_coefficients
from kylelab.equilibrium import build_quote
from kylelab.errors import DomainError, HeavyTail
from kylelab.metrics import reversal_M
from kylelab.model import ModelKind, ModelParams, params_from_rho_m
from kylelab.simulate import SimConfig
from kylelab.verify import McEstimate

CFG = SimConfig(n_paths=4000, n_steps=100, seed=11)


class TestMcEstimate:
    def test_two_pass_matches_numpy(self):
        x = np.random.default_rng(0).normal(1e8, 1.0, 10_000)
        est = McEstimate.from_samples(x, 1e8)
        assert est.std_error == pytest.approx(x.std(ddof=1) / 100, rel=1e-6)
        assert est.mean == pytest.approx(math.fsum(x) / x.size, rel=1e-15)

    def test_pass_consistent_with_fields(self):
        est = McEstimate(1.0, 0.1, 100, 1.29)
        assert est.passed and est.z_score == pytest.approx(-2.9)
        assert not McEstimate(1.0, 0.1, 100, 1.31).passed
        assert McEstimate(1.0, 0.0, 5, 1.0).passed and McEstimate(1.0, 0.0, 5, 1.1).z_score == -math.inf

    def test_floor(self):
        assert McEstimate(1.0, 0.01, 10, 1.2, floor=0.25).passed

    def test_shift_fails_at_5_se(self):
        est = McEstimate(2.0, 0.05, 10, 2.0)
        assert not est.shifted(5.0).passed and est.shifted(2.0).passed


class TestChecks:
    @pytest.mark.parametrize("kind,branch", [("kyle", 1), ("ca-insider", 1), ("mm-insider", 2), ("mm-strategic", 1)])
    def test_profit_and_negative_control(self, kind, branch, unit_params):
        ok = verify.check_profit(kind, unit_params, branch, CFG)
        bad = verify.check_profit(kind, unit_params, branch, CFG, perturb_se=5.0)
        assert ok.verdict and not bad.verdict
        assert ok.details["closure_max"] < 1e-10

    def test_noise_pnl_targets_shared(self, unit_params):
        r = verify.check_noise_pnl("mm-insider", unit_params, CFG, 1)
        assert r.estimate.target == pytest.approx(-1.6180339887498949)
        assert r.residual == 0.0 and r.verdict

    @pytest.mark.parametrize("kind,branch", [("ca-insider", 1), ("mm-insider", 1), ("ca-strategic", 1), ("mm-strategic", 2)])
    def test_liquidity_utility(self, kind, branch, unit_params):
        r = verify.check_liquidity_utility(kind, unit_params, branch, CFG)
        assert r.verdict and r.details["clamp_rate"] == 0.0
        assert not verify.check_liquidity_utility(kind, unit_params, branch, CFG, perturb_se=5.0).verdict

    def test_heavy_tail_guard(self, monkeypatch, unit_params):
        monkeypatch.setattr(verify, "CLAMP", 1e-3)
        with pytest.raises(HeavyTail):
            verify.check_liquidity_utility("ca-insider", unit_params, 1, CFG.replace(seed=12))

    def test_martingale(self, unit_params):
        reps = verify.check_martingale_M(unit_params, 1.0, 2, CFG, t_list=(0.0, 0.5, 1.0))
        assert reps[0].estimate.mean == 1.0 and reps[0].estimate.std_error == 0.0
        assert all(r.verdict for r in reps)

    def test_martingale_rho_zero(self):
        reps = verify.check_martingale_M(ModelParams(rho=0.0), 1.0, 1, CFG, t_list=(0.5,))
        assert reps[0].estimate.mean == 1.0 and reps[0].estimate.std_error == 0.0

    def test_reversal_exact_limit(self):
        p = params_from_rho_m(2.0)
        cs = market_coefficients(p, "ca-insider", build_quote(p, "ca-insider"))
        for eps in (1e-3, 1e-4):
            err = abs(verify.reversal_exact(0.5, eps, cs) - reversal_M(0.5, "ca-insider", p))
            assert err < 5 * eps * abs(reversal_M(0.5, "ca-insider", p))

    def test_reversal_kyle_zero(self, unit_params):
        for r in verify.check_reversal("kyle", unit_params, CFG):
            assert r.estimate.target == 0.0 and r.verdict

    def test_efficiency_domain(self, unit_params):
        with pytest.raises(DomainError):
            verify.check_efficiency("ca-strategic", unit_params, CFG)
        r = verify.check_efficiency("mm-insider", unit_params, CFG)
        assert r.details["Sigma(0)"] == 1.0 and r.details["Sigma(1)"] == 0.0

    def test_odes_negative_control(self, unit_params):
        assert verify.check_coefficient_odes(unit_params, 1.0, 2).verdict
        assert not verify.check_coefficient_odes(unit_params, 1.0, 2, alpha2_scale=1.01).verdict

    def test_bridge(self, unit_params):
        assert verify.check_bridge_terminal("mm-insider", unit_params, CFG, 2).verdict
        with pytest.raises(DomainError):
            verify.check_bridge_terminal("ca-strategic", unit_params, CFG)
        r = verify.check_euler_terminal("ca-insider", unit_params, eps=1e-2, n_paths=200)
        assert r.verdict and r.tolerance == pytest.approx(5 * 1.6180339887 * 0.1)


class TestReport:
    def test_schema(self, unit_params):
        r = verify.check_profit("ca-insider", unit_params, 1, CFG)
        rec = r.record()
        assert {"name", "target", "mean", "se", "z", "pass"} <= set(rec)
        assert all(not isinstance(v, (dict, list)) for v in rec.values())
        body = json.loads(verify.report_json([r], {"seed": 11}))
        assert body["all_pass"] and body["checks"][0]["config.n_paths"] == 4000

    def test_bit_reproducible(self, unit_params, threads):
        verify.clear_cache()
        threads(1)
        a = verify.report_json([verify.check_profit("mm-insider", unit_params, 1, CFG)])
        verify.clear_cache()
        threads(3)
        b = verify.report_json([verify.check_profit("mm-insider", unit_params, 1, CFG.replace())])
        assert a == b

    def test_unknown_suite(self):
        with pytest.raises(DomainError):
            verify.run_suite("huge")
