"""Unit tests for the suites module."""

import math

import numpy as np
import pytest

from exactdom.bounds import lambda_i
from exactdom.complex_core import DiskGrid
from exactdom.models import CheckStatus, OperatorId, ParamSet
from exactdom.suites import (
    PRESETS,
    SUITES,
    dominant_diagnostics,
    lower_bound,
    property_configs,
    resolve_preset,
    run_examples,
    run_exactness,
    run_properties,
    run_sharpness,
    run_univalence,
    sharpness_cases,
)
from exactdom.targets import make_exp, make_janowski

SMALL = DiskGrid.uniform(0.9, 8, 32)


class TestPresets:
    def test_resolve_is_case_insensitive(self):
        assert resolve_preset(" halfplane-identity ").name == "halfplane-identity"

    def test_unknown_preset(self):
        with pytest.raises(ValueError, match="Available presets"):
            resolve_preset("example-9")

    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_presets_are_admissible(self, name):
        preset = PRESETS[name]
        params = preset.params()
        assert params.operator_id == preset.operator_id
        assert preset.build_target().center == pytest.approx(1.0)
        assert preset.oracle is not None

    def test_suite_registry(self):
        assert sorted(SUITES) == ["examples", "exactness", "properties", "sharpness", "univalence"]


class TestDominantDiagnostics:
    def test_halfplane_identity(self):
        preset = PRESETS["halfplane-identity"]
        _, _, report = dominant_diagnostics(
            preset.params(), preset.build_target(), SMALL, boundary_samples=512, oracle=preset.oracle
        )
        assert report.passed
        assert report.a0 == pytest.approx(1.0)
        assert report.containment == "pass"
        assert report.closed_form_error < 1e-8

    def test_higher_order_skips_implicit_relation(self):
        params = ParamSet.checked(-1.0 / 3.0, 0.5, 1.0, 2, OperatorId.PSI1)
        _, _, report = dominant_diagnostics(params, make_exp(1.0), SMALL, boundary_samples=512)
        statuses = {c.name: c.status for c in report.checks}
        assert statuses["implicit_relation_residual"] == CheckStatus.SKIPPED
        assert "closed_form_error" not in statuses

    def test_non_convex_majorant_is_informational(self):
        preset = PRESETS["arctan-shifted"]
        grid = DiskGrid.uniform(0.95, 16, 128)
        _, _, report = dominant_diagnostics(preset.params(), preset.build_target(), grid, oracle=preset.oracle)
        check = next(c for c in report.checks if c.name == "convexity_margin_H")
        assert check.status != CheckStatus.FAIL
        if report.convexity_margin_H < 0:
            assert check.status == CheckStatus.SKIPPED
            assert check.detail.startswith("informational")
        assert report.convexity_margin_q > 0
        assert report.passed


class TestExamplesSuite:
    def test_single_preset(self):
        report = run_examples(grid=SMALL, boundary_samples=512, names=["halfplane-identity"])
        assert report.passed
        assert report.chain_ok is True
        assert all(c.name.startswith("halfplane-identity:") for c in report.checks)

    def test_all_presets_pass(self):
        report = run_examples(grid=SMALL)
        assert report.passed, [c.name for c in report.failures]
        assert report.chain_ok is True
        assert {name.split(":")[0] for name in (c.name for c in report.checks)} == set(PRESETS)


class TestExactnessSuite:
    def test_both_operators(self):
        report = run_exactness(samples=20, seed=5)
        assert report.passed
        names = [c.name for c in report.checks]
        assert names == [
            "psi1:exactness_residual",
            "psi1:perturbed_control",
            "psi2:exactness_residual",
            "psi2:perturbed_control",
        ]
        assert report.details["psi1"]["samples"] == 20

    def test_deterministic(self):
        a = run_exactness(samples=5, seed=11)
        b = run_exactness(samples=5, seed=11)
        assert a.model_dump() == b.model_dump()


class TestSharpnessSuite:
    def test_half_plane_case(self):
        cases = [c for c in sharpness_cases() if c.name == "halfplane"]
        report = run_sharpness(n_theta=128, cases=cases)
        assert report.passed
        assert len(report.sharpness_table) == 4
        assert report.details["sharpness_cases"][0]["bound"] == pytest.approx(2.0 * math.log(2.0) - 1.0)

    def test_default_run(self):
        report = run_sharpness()
        assert report.passed, [c.name for c in report.failures]
        assert len(report.sharpness_table) == 4 * len(sharpness_cases())
        assert [b["case"] for b in report.details["sharpness_cases"]] == [c.name for c in sharpness_cases()]


class TestPropertiesSuite:
    def test_configs_cover_both_operators(self):
        configs = property_configs()
        assert len(configs) == 8
        assert {p.operator_id for _, _, p in configs} == {OperatorId.PSI1, OperatorId.PSI2}

    def test_psi2_params_stay_below_pole(self):
        ring = 0.999 * np.exp(2j * np.pi * np.arange(2048) / 2048)
        for _, target, params in property_configs():
            if params.operator_id == OperatorId.PSI2:
                assert np.max(np.abs(params.root_gb * target.func(ring))) <= 1.2 + 1e-12

    def test_lower_bound_psi1(self):
        params = ParamSet.checked(-1.0 / 3.0, 0.5, 1.0, 1, OperatorId.PSI1)
        lam = 1.0 - math.exp(-1.0)
        expected = ((0.5 * (4.0 / 3.0) * lam) ** 0.75 - 1.0) / 0.5
        assert lower_bound("exp", make_exp(1.0), params) == pytest.approx(expected, abs=1e-10)

    def test_lower_bound_psi2(self):
        params = ParamSet.checked(0.0, 1.0, 0.25, 1, OperatorId.PSI2)
        h = make_janowski(1.0, -1.0)
        lam = lambda_i("1", h.params).value
        assert lower_bound("janowski", h, params) == pytest.approx(0.5 * math.tan(0.5 * lam))

    def test_report_layout(self):
        report = run_properties(samples=1, seed=2, grid=DiskGrid.uniform(0.9, 6, 24), boundary_samples=512)
        assert len(report.checks) == 8 * 6
        assert len(report.details) == 8
        assert report.ode_max_residual is not None

    def test_small_run_passes(self):
        report = run_properties(samples=2, seed=4, grid=DiskGrid.uniform(0.9, 6, 24), boundary_samples=1024)
        assert report.passed, [c.name for c in report.failures]
        assert report.chain_ok is True
        assert report.counterexamples == []


class TestUnivalenceSuite:
    def test_small_run_passes(self):
        report = run_univalence(samples=3, seed=1, grid=DiskGrid.uniform(0.9, 6, 32))
        assert report.passed
        assert report.suite == "univalence"
