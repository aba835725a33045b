import math

import pytest

from kylelab.errors import DomainError
from kylelab.model import (
    Branch,
    ModelKind,
    ModelParams,
    market_adjusted_risk_aversion,
    params_from_rho_m,
    validate,
)


class TestValidate:
    @pytest.mark.parametrize("field,value", [("gamma", 0.0), ("sigma", -1.0), ("rho", -0.1), ("mu", math.nan), ("gamma", math.inf)])
    def test_rejects_bad_field(self, field, value):
        with pytest.raises(DomainError) as err:
            validate(ModelParams().replace(**{field: value}))
        assert err.value.field == field

    def test_accepts_rho_zero(self):
        assert validate(ModelParams(rho=0.0)).rho == 0.0

    def test_returns_same_object(self, unit_params):
        assert validate(unit_params) is unit_params


class TestRhoM:
    def test_product(self):
        assert market_adjusted_risk_aversion(ModelParams(gamma=2.0, sigma=0.5, rho=3.0)) == 3.0

    def test_roundtrip(self):
        p = params_from_rho_m(1.7, gamma=2.0, sigma=0.25)
        assert math.isclose(market_adjusted_risk_aversion(p), 1.7, rel_tol=1e-15)


class TestKinds:
    def test_parse_aliases(self):
        assert ModelKind.parse("MM_INSIDER") is ModelKind.MM_INSIDER
        assert ModelKind.parse("ca-strategic") is ModelKind.CA_STRATEGIC
        with pytest.raises(ValueError):
            ModelKind.parse("dealer")

    def test_flags(self):
        assert ModelKind.KYLE.informed and not ModelKind.KYLE.market_makers
        assert not ModelKind.MM_STRATEGIC.informed and ModelKind.MM_STRATEGIC.branched
        assert not ModelKind.CA_INSIDER.branched

    def test_branch_sign(self):
        assert Branch(1).sign == -1 and Branch(2).sign == 1
        with pytest.raises(DomainError):
            Branch(3)
