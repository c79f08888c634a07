"""Unit tests for the targets module."""

import numpy as np
import pytest

from exactdom.complex_core import DiskGrid
from exactdom.errors import TargetValidationError
from exactdom.targets import (
    CATALOG,
    custom_target,
    derivative_mismatch,
    make_exp,
    make_janowski,
    make_janowski_reversed,
    make_sector,
    make_shifted_halfplane,
    make_sqrt,
    resolve_target,
    sector_constants,
    self_test,
    target_convexity_margin,
)

GRID = DiskGrid.uniform(0.8, 6, 24)


class TestJanowski:
    def test_values(self):
        h = make_janowski(1.0, -1.0)
        assert h(0.0) == pytest.approx(1.0)
        assert h(0.5) == pytest.approx(3.0)
        assert h.d1(0.0) == pytest.approx(2.0)
        assert h.d2(0.0) == pytest.approx(4.0)

    def test_scalar_in_scalar_out(self):
        assert isinstance(make_janowski(1.0, -1.0).eval(0.25), complex)

    def test_array_in_array_out(self):
        z = np.array([[0.1, 0.2], [0.3j, -0.4]])
        assert make_janowski(0.5, -0.5).eval(z).shape == (2, 2)

    def test_order_constraint(self):
        with pytest.raises(TargetValidationError, match="-1 <= B < A <= 1"):
            make_janowski(-1.0, 1.0)

    def test_reversed_order_constraint(self):
        assert make_janowski_reversed(0.0, 1.0)(0.5) == pytest.approx(1.0 / 1.5)
        with pytest.raises(TargetValidationError, match="-1 <= A < B <= 1"):
            make_janowski_reversed(1.0, -1.0)


class TestOtherTargets:
    def test_exp_modulus_limit(self):
        assert make_exp(0.5j)(0.0) == pytest.approx(1.0)
        with pytest.raises(TargetValidationError):
            make_exp(1.5)

    def test_sqrt_range(self):
        assert make_sqrt(1.0)(0.44) == pytest.approx(1.2)
        with pytest.raises(TargetValidationError):
            make_sqrt(2.0)

    def test_sector_constants(self):
        rho, rp, c = sector_constants(1.0, 0.5)
        assert rho == pytest.approx(1.0 / 3.0)
        assert rp == pytest.approx(0.75)
        assert c == pytest.approx(np.exp(1j * np.pi / 3.0))

    def test_symmetric_unit_sector_is_half_plane(self):
        z = GRID.points
        assert np.allclose(make_sector(1.0, 1.0).func(z), make_janowski(1.0, -1.0).func(z), atol=1e-12)

    def test_sector_angle(self):
        h = make_sector(1.0, 0.5)
        ring = 0.999 * np.exp(1j * np.linspace(0.0, 2 * np.pi, 721))
        angles = np.angle(h.func(ring))
        assert angles.max() < np.pi / 2
        assert angles.min() > -np.pi / 4

    def test_shifted_halfplane(self):
        h = make_shifted_halfplane(2.0)
        assert h(1.0) == pytest.approx(3.0)
        with pytest.raises(TargetValidationError):
            make_shifted_halfplane(1.0)


class TestCatalog:
    @pytest.mark.parametrize("label", sorted(CATALOG))
    def test_defaults_resolve(self, label):
        h = resolve_target(label)
        assert h.label == label
        assert h.center == pytest.approx(1.0)

    @pytest.mark.parametrize("label", sorted(CATALOG))
    def test_derivatives_match_finite_differences(self, label):
        err1, err2 = derivative_mismatch(resolve_target(label), GRID)
        assert err1 < 1e-7
        assert err2 < 1e-6

    @pytest.mark.parametrize("label", sorted(CATALOG))
    def test_convex(self, label):
        assert target_convexity_margin(resolve_target(label), GRID) > 0

    def test_partial_parameters(self):
        h = resolve_target("janowski", {"B": -0.5})
        assert h.params == {"A": 1.0, "B": -0.5}

    def test_unknown_label(self):
        with pytest.raises(TargetValidationError, match="Available targets"):
            resolve_target("koebe")

    def test_unknown_parameter(self):
        with pytest.raises(TargetValidationError, match="no parameter 'C'"):
            resolve_target("janowski", {"C": 1.0})

    def test_complex_parameter_rejected(self):
        with pytest.raises(TargetValidationError, match="must be real"):
            resolve_target("sqrt", {"kappa": 0.5 + 0.5j})

    def test_complex_mu_allowed(self):
        assert resolve_target("exp", {"mu": 0.6j}).params["mu"] == 0.6j


class TestCustomTarget:
    def test_accepts_convex_map(self):
        h = custom_target(
            "disk",
            lambda z: 1.0 + 0.5 * z,
            lambda z: 0.5 + 0 * z,
            lambda z: 0 * z,
            GRID,
        )
        assert h.center == pytest.approx(1.0)

    def test_rejects_koebe(self):
        with pytest.raises(TargetValidationError, match="convexity margin"):
            custom_target(
                "koebe",
                lambda z: z / (1 - z) ** 2,
                lambda z: (1 + z) / (1 - z) ** 3,
                lambda z: (2 * z + 4) / (1 - z) ** 4,
                DiskGrid.uniform(0.95, 8, 64),
            )

    def test_rejects_wrong_derivative(self):
        with pytest.raises(TargetValidationError, match="first derivative"):
            custom_target("bad", np.exp, lambda z: 2 * np.exp(z), np.exp, GRID)

    def test_self_test_report(self):
        report = self_test(make_janowski(1.0, -1.0), GRID)
        assert report.violations() == []
        assert report.center_error == 0.0
