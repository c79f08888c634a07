"""Unit tests for the bounds module."""

import math

import pytest
from scipy import special

from exactdom.bounds import (
    CASE_TARGETS,
    LAMBDA4_CAP,
    LAMBDA4_REMAINDER_TAG,
    LAMBDA4_TERM_TOL,
    bound_report,
    eta_miller_mocanu,
    eta_via_reversed_janowski,
    gamma_lanczos,
    hyp1f1,
    hyp2f1,
    hyp2f1_detailed,
    lambda4_partial_sums,
    lambda_i,
    q_extremal_oracle,
    xi_bound,
    zeta_bound,
)
from exactdom.errors import DomainError, NonConvergenceError, ParameterValidationError, PoleError
from exactdom.models import OperatorId
from exactdom.targets import make_exp, make_janowski, make_sector, resolve_target

LN2 = math.log(2.0)


class TestGamma:
    @pytest.mark.parametrize("x", [0.3, 0.5, 1.0, 2.5, 7.25, -1.5, -0.2])
    def test_against_scipy(self, x):
        assert gamma_lanczos(x) == pytest.approx(special.gamma(x), rel=1e-12)

    def test_pole(self):
        with pytest.raises(PoleError):
            gamma_lanczos(-2.0)


class TestHypergeometric:
    @pytest.mark.parametrize(
        "a, b, c, x",
        [
            (1.0, 1.0, 2.0, 0.5),
            (0.5, 1.0 / 3.0, 4.0 / 3.0, -0.7),
            (-0.5, 0.5, 1.5, 0.99),
            (1.0, 2.0, 3.0, -0.99),
            (0.75, 1.0, 2.0, 1.0),
        ],
    )
    def test_2f1_against_scipy(self, a, b, c, x):
        assert hyp2f1(a, b, c, x) == pytest.approx(special.hyp2f1(a, b, c, x), rel=1e-10)

    def test_2f1_at_minus_one(self):
        # 2F1(1, 1; 2; -1) = ln 2
        result = hyp2f1_detailed(1.0, 1.0, 2.0, -1.0)
        assert result.value.real == pytest.approx(LN2, abs=1e-12)
        assert result.method == "euler"

    def test_2f1_divergent_at_one(self):
        with pytest.raises(DomainError):
            hyp2f1_detailed(1.0, 1.0, 2.0, 1.0)

    def test_2f1_outside_interval(self):
        with pytest.raises(DomainError):
            hyp2f1(1.0, 1.0, 2.0, 1.5)

    @pytest.mark.parametrize("a, b, x", [(1.0, 2.0, -1.0), (0.5, 1.5, 0.8), (1.0 / 3.0, 4.0 / 3.0, -0.6)])
    def test_1f1_against_scipy(self, a, b, x):
        assert hyp1f1(a, b, x) == pytest.approx(special.hyp1f1(a, b, x), rel=1e-12)


class TestLambda:
    def test_half_plane(self):
        result = lambda_i("1", {"A": 1.0, "B": -1.0})
        assert result.value == pytest.approx(2.0 * LN2 - 1.0, abs=1e-10)
        assert result.tags == []

    def test_janowski_interior_order(self):
        result = lambda_i("1", {"A": 0.5, "B": -0.5})
        assert result.value == pytest.approx(4.0 * math.log(1.5) - 1.0, abs=1e-12)

    def test_exp(self):
        assert lambda_i("2", {"mu": 1.0}).value == pytest.approx(1.0 - math.exp(-1.0), abs=1e-12)

    def test_complex_mu_is_tagged(self):
        result = lambda_i("2", {"mu": 0.5j})
        assert "min-location unverified" in result.tags

    def test_sqrt(self):
        assert lambda_i("3", {"kappa": 1.0}).value == pytest.approx(2.0 / 3.0, abs=1e-9)

    def test_symmetric_unit_sector(self):
        result = lambda_i("4", {"rho1": 1.0, "rho2": 1.0})
        assert result.value == pytest.approx(2.0 * LN2 - 1.0, abs=1e-8)
        assert result.convergence.method == "series"

    def test_partial_sums_settle(self):
        sums = lambda4_partial_sums(1.0, 1.0, 1, 4)
        assert sums[-1].real == pytest.approx(2.0 * LN2 - 1.0, abs=1e-10)

    def test_asymmetric_sector_is_tagged(self):
        result = lambda_i("4", {"rho1": 1.0, "rho2": 0.5})
        assert "complex-valued Q(-1); min-location unverified" in result.tags
        assert result.convergence.method == "series+remainder"
        oracle = q_extremal_oracle(make_sector(1.0, 0.5), 1)
        assert result.value == pytest.approx(oracle.real, abs=1e-8)
        assert result.imag == pytest.approx(oracle.imag, abs=1e-8)

    def test_strict_tail_refuses_slow_series(self):
        with pytest.raises(NonConvergenceError):
            lambda_i("4", {"rho1": 0.5, "rho2": 0.5}, tail="strict")

    def test_series_stops_on_small_term(self):
        result = lambda_i("4", {"rho1": 1.0, "rho2": 1.0}, tail="strict")
        assert result.convergence.tail <= LAMBDA4_TERM_TOL
        assert result.convergence.terms <= LAMBDA4_CAP
        assert result.tags == []

    def test_capped_series_is_tagged(self):
        result = lambda_i("4", {"rho1": 0.5, "rho2": 0.5})
        assert result.convergence.method == "series+remainder"
        assert LAMBDA4_REMAINDER_TAG in result.tags
        # h = sqrt((1+z)/(1-z)): Q(-1) = int_0^1 sqrt((1-u)/(1+u)) du = pi/2 - 1
        assert result.value == pytest.approx(math.pi / 2.0 - 1.0, abs=1e-8)

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("case_id", ["1", "1r", "2", "3"])
    def test_matches_direct_quadrature(self, case_id, n):
        target = resolve_target(CASE_TARGETS[case_id])
        if case_id == "1r":
            target = resolve_target("janowski-reversed", {"A": -0.5, "B": 0.5})
        value = lambda_i(case_id, target.params, n).value
        assert value == pytest.approx(q_extremal_oracle(target, n, case_id).real, abs=1e-9)

    def test_unknown_case(self):
        with pytest.raises(ParameterValidationError, match="unknown bound case"):
            lambda_i("5", {})

    def test_wrong_order(self):
        with pytest.raises(ParameterValidationError, match="-1 <= B < A <= 1"):
            lambda_i("1", {"A": -1.0, "B": 1.0})

    def test_bad_tail_mode(self):
        with pytest.raises(ParameterValidationError):
            lambda_i("1", {"A": 1.0, "B": -1.0}, tail="lazy")


class TestDerivedBounds:
    def test_zeta_identity_operator(self):
        assert zeta_bound(0.0, 1.0, 0.0, 0.3) == pytest.approx(0.3)

    def test_zeta_square_root(self):
        assert zeta_bound(-1.0, 1.0, 0.0, 0.2) == pytest.approx(math.sqrt(0.4))

    def test_zeta_needs_positive_beta(self):
        with pytest.raises(ParameterValidationError):
            zeta_bound(0.0, -1.0, 0.0, 0.3)

    def test_xi(self):
        assert xi_bound(0.0, 1.0, 0.25, 0.8) == pytest.approx(0.5 * math.tan(0.4))

    def test_xi_past_the_pole(self):
        with pytest.raises(DomainError):
            xi_bound(0.0, 1.0, 4.0, 1.0)

    @pytest.mark.parametrize("a", [0.0, 0.25, 0.5, 0.9])
    def test_eta_two_ways(self, a):
        direct = math.sqrt(2.0 * (1.0 - a) * LN2 + 2.0 * a - 1.0)
        assert eta_miller_mocanu(a) == pytest.approx(direct, abs=1e-12)
        assert eta_via_reversed_janowski(a) == pytest.approx(direct, abs=1e-10)

    def test_eta_range(self):
        with pytest.raises(ParameterValidationError):
            eta_miller_mocanu(1.0)


class TestBoundReport:
    def test_half_plane_report(self):
        h = make_janowski(1.0, -1.0)
        report = bound_report("1", h.params, h, 1, OperatorId.PSI1, 0.0, 1.0, 0.0)
        assert report.passed
        assert report.lambda_ == pytest.approx(2.0 * LN2 - 1.0, abs=1e-10)
        assert report.zeta == pytest.approx(report.lambda_)
        assert report.xi is None

    def test_psi2_report_has_xi(self):
        h = make_exp(1.0)
        report = bound_report("2", h.params, h, 1, OperatorId.PSI2, -1.0 / 3.0, 1.0, 0.25)
        assert report.passed
        assert report.zeta is None
        assert report.xi > 0

    def test_alias_in_dump(self):
        h = make_janowski(1.0, -1.0)
        report = bound_report("1", h.params, h, 1, OperatorId.PSI1, 0.0, 1.0, 0.0)
        assert "lambda" in report.model_dump(by_alias=True)
