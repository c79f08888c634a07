"""Unit tests for the models module."""

import pytest
from pydantic import ValidationError

from exactdom.errors import ParameterValidationError
from exactdom.models import (
    BoundReport,
    CheckResult,
    CheckStatus,
    Convergence,
    OperatorId,
    ParamSet,
    SharpnessRow,
    ValidationReport,
    VerificationReport,
    param_violations,
)


class TestOperatorId:
    def test_values(self):
        assert OperatorId("psi1") == OperatorId.PSI1
        assert OperatorId("psi2") == OperatorId.PSI2

    def test_invalid(self):
        with pytest.raises(ValueError):
            OperatorId("psi3")


class TestParamSet:
    def test_valid(self):
        params = ParamSet.checked(-0.5, 2.0, 1.0, 1, "psi1")
        assert params.operator_id == OperatorId.PSI1
        assert params.exponent == pytest.approx(2.0 / 3.0)

    def test_root_gb(self):
        params = ParamSet.checked(0.0, 1.0, 0.25, 1, OperatorId.PSI2)
        assert params.root_gb == pytest.approx(0.5)

    def test_all_violations_reported(self):
        with pytest.raises(ParameterValidationError) as info:
            ParamSet.checked(0.5, 0.0, 0.0, 0, OperatorId.PSI2)
        assert len(info.value.violations) == 4

    def test_violation_list(self):
        assert param_violations(-1.0, 1.0, 0.0, 1, OperatorId.PSI1) == []
        assert param_violations(-1.5, 1.0, 0.0, 1, OperatorId.PSI1) == ["alpha must lie in [-1, 0] (got -1.5)"]

    def test_direct_construction_validates(self):
        with pytest.raises(ValidationError):
            ParamSet(alpha=0.0, beta=1.0, gamma=0.0, operator_id=OperatorId.PSI2)

    def test_frozen(self):
        params = ParamSet.checked(0.0, 1.0)
        with pytest.raises(ValidationError):
            params.alpha = -0.5

    def test_echo(self):
        echo = ParamSet.checked(-1.0 / 3.0, 0.5, 1.0).echo()
        assert echo["operator"] == "psi1"
        assert echo["beta"] == 0.5


class TestCheckResult:
    def test_compare_below(self):
        assert CheckResult.compare("r", 1e-9, 1e-7).status == CheckStatus.PASS
        assert CheckResult.compare("r", 1e-6, 1e-7).status == CheckStatus.FAIL

    def test_compare_above(self):
        assert CheckResult.compare("m", 0.2, 0.0, below=False).status == CheckStatus.PASS
        assert CheckResult.compare("m", 0.0, 0.0, below=False).status == CheckStatus.FAIL

    def test_flag(self):
        assert CheckResult.flag("f", True).status == CheckStatus.PASS
        assert CheckResult.flag("f", None).status == CheckStatus.INCONCLUSIVE


class TestReports:
    def test_passed_counts_skips(self):
        report = ValidationReport(checks=[CheckResult.flag("a", True), CheckResult.skipped("b", "n/a")])
        assert report.passed
        assert report.failures == []

    def test_inconclusive_is_not_a_pass(self):
        report = ValidationReport(checks=[CheckResult.flag("a", None)])
        assert not report.passed
        assert len(report.failures) == 1

    def test_bound_report_alias(self):
        report = BoundReport(case_id="1", **{"lambda": 0.5}, convergence=Convergence(method="series"))
        assert report.lambda_ == 0.5
        assert report.model_dump(by_alias=True)["lambda"] == 0.5

    def test_merge(self):
        a = VerificationReport(
            suite="properties",
            convexity_margin_q=0.4,
            chain_ok=True,
            ode_max_residual=1e-9,
            sharpness_table=[SharpnessRow(r=0.5, min_re_q=1.0, argmin_theta=3.14)],
            checks=[CheckResult.flag("x", True)],
            details={"a": 1},
        )
        b = VerificationReport(
            suite="properties",
            convexity_margin_q=0.2,
            convexity_margin_H=0.7,
            chain_ok=False,
            ode_max_residual=1e-8,
            checks=[CheckResult.flag("y", False)],
            counterexamples=[{"check": "p_in_q"}],
            details={"b": 2},
        )
        merged = a.merge(b)
        assert merged.convexity_margin_q == 0.2
        assert merged.convexity_margin_H == 0.7
        assert merged.chain_ok is False
        assert merged.ode_max_residual == 1e-8
        assert len(merged.checks) == 2
        assert len(merged.sharpness_table) == 1
        assert merged.details == {"a": 1, "b": 2}
        assert not merged.passed
