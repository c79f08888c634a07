"""Unit tests for the complex_core module."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactdom.complex_core import (
    BoundaryCurve,
    DiskGrid,
    arctan_c,
    continuous_log_rays,
    continuous_pow_along_ray,
    num_deriv,
    principal_arg,
    principal_pow,
    quad_unit,
    quad_unit_detailed,
    winding_number,
    winding_numbers,
)
from exactdom.errors import (
    BranchCollapseError,
    DomainError,
    IndeterminateMembershipError,
    NonConvergenceError,
    PoleError,
)


class TestDiskGrid:
    def test_uniform_shape_and_points(self):
        grid = DiskGrid.uniform(0.9, 3, 8)
        assert grid.shape == (8, 3)
        assert grid.n_r == 3
        assert np.allclose(grid.r_levels, [0.3, 0.6, 0.9])
        assert grid.r_max == pytest.approx(0.9)
        assert grid.points[2, 1] == pytest.approx(0.6 * np.exp(1j * 2 * np.pi * 2 / 8))

    def test_ray_is_row(self):
        grid = DiskGrid.uniform(0.5, 4, 4)
        assert np.allclose(grid.points[1], 1j * grid.r_levels)

    def test_rejects_unit_radius(self):
        with pytest.raises(ValueError, match="r_max"):
            DiskGrid.uniform(1.0, 4, 8)

    def test_rejects_unsorted_levels(self):
        with pytest.raises(ValueError):
            DiskGrid(np.array([0.5, 0.2]), 8)

    def test_interior_mask(self):
        grid = DiskGrid.uniform(0.9, 3, 4)
        mask = grid.interior_mask(0.6)
        assert mask.shape == grid.shape
        assert mask[:, :2].all()
        assert not mask[:, 2].any()


class TestPrincipalPowers:
    def test_negative_axis_argument_is_pi(self):
        assert principal_arg(complex(-1.0, -0.0)) == pytest.approx(math.pi)

    def test_square_root_of_minus_one(self):
        assert principal_pow(-1.0, 0.5) == pytest.approx(1j)

    def test_zero_base(self):
        assert principal_pow(0.0, 0.5) == 0
        with pytest.raises(DomainError):
            principal_pow(0.0, -1.0)

    @settings(max_examples=50, deadline=None)
    @given(
        st.floats(0.05, 5.0),
        st.floats(-3.0, 3.0),
        st.floats(-2.0, 2.0),
    )
    def test_modulus_identity(self, modulus, angle, s):
        w = modulus * np.exp(1j * angle)
        assert abs(principal_pow(w, s)) == pytest.approx(modulus**s, rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.05, 5.0), st.floats(-3.0, 3.0))
    def test_product_of_halves(self, modulus, angle):
        w = modulus * np.exp(1j * angle)
        half = principal_pow(w, 0.5)
        assert half * half == pytest.approx(w, rel=1e-12, abs=1e-12)


class TestContinuation:
    def test_follows_the_circle_past_the_cut(self):
        theta = np.linspace(0.0, 1.5 * np.pi, 200)
        out = continuous_pow_along_ray(np.exp(1j * theta), 0.5, 1.0 + 0j)
        assert out[-1] == pytest.approx(np.exp(0.75j * np.pi))

    def test_departure_flag(self):
        theta = np.linspace(0.0, 1.5 * np.pi, 200)
        values = np.vstack([np.exp(1j * theta), np.exp(0.1j * theta)])
        _, departed = continuous_log_rays(values)
        assert departed.tolist() == [True, False]

    def test_zero_collapses_branch(self):
        with pytest.raises(BranchCollapseError) as info:
            continuous_pow_along_ray(np.array([1.0, 0.5, 0.0]), 0.5, 1.0 + 0j, ray=3)
        assert info.value.ray == 3
        assert info.value.index == 2

    def test_wrong_anchor(self):
        with pytest.raises(ValueError, match="anchor"):
            continuous_pow_along_ray(np.array([4.0, 4.1]), 0.5, -2.0 + 0j)


class TestArctan:
    def test_real_axis(self):
        assert arctan_c(0.5) == pytest.approx(math.atan(0.5))

    def test_inverse_of_tan(self):
        w = 0.3 + 0.2j
        assert np.tan(arctan_c(w)) == pytest.approx(w, abs=1e-14)

    def test_poles(self):
        with pytest.raises(PoleError):
            arctan_c(1j)
        with pytest.raises(PoleError):
            arctan_c(-1j)


class TestNumDeriv:
    def test_first_derivative(self):
        z = 0.3 + 0.1j
        assert num_deriv(np.exp, z, order=1) == pytest.approx(np.exp(z), abs=1e-9)

    def test_second_derivative(self):
        z = 0.3 + 0.1j
        assert num_deriv(np.exp, z, order=2) == pytest.approx(np.exp(z), abs=1e-8)

    def test_vectorised(self):
        z = np.array([0.1, 0.2j, -0.3])
        out = num_deriv(lambda w: w**3, z)
        assert np.allclose(out, 3 * z**2, atol=1e-9)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            num_deriv(np.exp, 0.0, order=3)


class TestQuadrature:
    def test_polynomial(self):
        assert quad_unit(lambda u: u**2) == pytest.approx(1.0 / 3.0, abs=1e-14)

    def test_batched_integrands(self):
        out = quad_unit(lambda u: np.outer([1.0, 2.0], u))
        assert np.allclose(out, [0.5, 1.0], atol=1e-14)

    def test_complex_integrand(self):
        value = quad_unit(lambda u: np.exp(1j * np.pi * u))
        assert value == pytest.approx(2j / np.pi, abs=1e-13)

    def test_detailed_reports_error(self):
        result = quad_unit_detailed(lambda u: np.cos(20 * u))
        assert result.value == pytest.approx(math.sin(20.0) / 20.0, abs=1e-12)
        assert result.error <= 1e-10
        assert result.panels >= 1

    @settings(max_examples=25, deadline=None)
    @given(st.floats(-3.0, 3.0), st.floats(-3.0, 3.0))
    def test_linearity(self, a, b):
        f = lambda u: np.exp(u)
        g = lambda u: np.sin(3 * u)
        combined = quad_unit(lambda u: a * f(u) + b * g(u))
        assert combined == pytest.approx(a * quad_unit(f) + b * quad_unit(g), abs=1e-11)

    def test_near_pole_batch_converges(self):
        z = 0.999 * np.exp(1j * np.linspace(0.0, 2.0 * np.pi, 16, endpoint=False))
        result = quad_unit_detailed(lambda u: (1.0 - np.outer(z, u)) ** -3)
        exact = ((1.0 - z) ** -2 - 1.0) / (2.0 * z)
        assert np.allclose(result.value, exact, rtol=1e-9, atol=0.0)
        assert result.noise_limited >= 0

    def test_near_pole_scalar(self):
        c = 0.999
        assert quad_unit(lambda u: 1.0 / (1.0 - c * u)) == pytest.approx(-math.log1p(-c) / c, rel=1e-10)

    def test_endpoint_singularity_does_not_converge(self):
        with pytest.raises(NonConvergenceError):
            quad_unit(lambda u: 1.0 / np.sqrt(u))


class TestWinding:
    def _circle(self, n=512):
        return BoundaryCurve.from_map(lambda z: z, 1.0 - 1e-3, n)

    def test_inside_and_outside(self):
        curve = self._circle()
        assert winding_number(curve, 0j) == 1
        assert winding_number(curve, 2.0 + 0j) == 0

    def test_orientation(self):
        curve = BoundaryCurve.from_map(lambda z: np.conj(z), 0.5, 512)
        assert winding_number(curve, 0j) == -1

    def test_vectorised_shape(self):
        points = np.array([[0.1, 0.2j], [3.0, -4.0]])
        assert winding_numbers(self._circle(), points).tolist() == [[1, 1], [0, 0]]

    def test_point_on_curve(self):
        curve = self._circle()
        with pytest.raises(IndeterminateMembershipError):
            winding_number(curve, complex(curve.samples[5]))

    def test_curve_must_close(self):
        with pytest.raises(ValueError, match="closed"):
            BoundaryCurve(np.exp(1j * np.linspace(0.0, np.pi, 300)))

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            BoundaryCurve.from_map(lambda z: z, 0.5, 16)
