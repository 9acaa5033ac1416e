"""
Tests for adaptive and fixed-order quadrature.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from beamscint.src.errors import IntegrandNaNError, NonConvergenceError, UnsupportedDimensionError
from beamscint.src.numerics.models import Bound, Domain, QuadratureMethod, Transform
from beamscint.src.numerics.quadrature import gauss_legendre_product, integrate_1d, integrate_nd

HALF_GAUSSIAN = math.sqrt(math.pi) / 2.0


class TestIntegrate1d:
    """Reference integrals for the adaptive rule."""

    def test_polynomial(self):
        """A cubic over the unit interval."""
        res = integrate_1d(lambda x: x**3, 0.0, 1.0)
        assert res.value == pytest.approx(0.25, rel=1e-12)
        assert res.method is QuadratureMethod.ADAPTIVE_1D
        assert res.evaluations > 0

    @pytest.mark.parametrize("transform", [Transform.ALGEBRAIC, Transform.EXPONENTIAL])
    def test_semi_infinite_gaussian(self, transform):
        """Half-line Gaussian through either transform."""
        res = integrate_1d(lambda x: math.exp(-x * x), 0.0, math.inf, transform=transform)
        assert res.value == pytest.approx(HALF_GAUSSIAN, rel=1e-8)

    def test_whole_line(self):
        """Whole-line Gaussian."""
        res = integrate_1d(lambda x: math.exp(-x * x), -math.inf, math.inf)
        assert res.value == pytest.approx(math.sqrt(math.pi), rel=1e-8)

    def test_endpoint_singularity(self):
        """An integrable endpoint singularity."""
        res = integrate_1d(lambda x: x ** (-0.5), 0.0, 1.0)
        assert res.value == pytest.approx(2.0, rel=1e-8)

    def test_fourier_tail(self):
        """Oscillatory tails go through the Fourier weight."""
        res = integrate_1d(lambda x: math.exp(-x), 0.0, math.inf, abs_tol=1e-10, oscillation=1.0)
        assert res.value == pytest.approx(0.5, rel=1e-8)

    def test_error_estimate_is_reported(self):
        """The error estimate is small and non-negative."""
        res = integrate_1d(math.sin, 0.0, math.pi, rel_tol=1e-10)
        assert res.value == pytest.approx(2.0, rel=1e-10)
        assert 0.0 <= res.abs_error_estimate <= 1e-9

    def test_nan_names_coordinate(self):
        """A NaN names the coordinate that produced it."""
        with pytest.raises(IntegrandNaNError) as info:
            integrate_1d(lambda x: math.nan, 0.0, 1.0)
        assert 0.0 < info.value.coordinate < 1.0

    def test_budget_exhausted(self):
        """Running out of evaluations raises with the count."""
        with pytest.raises(NonConvergenceError) as info:
            integrate_1d(lambda x: math.sin(1e4 * x), 0.0, 1.0, rel_tol=1e-12, max_evaluations=200)
        assert info.value.evaluations > 0

    def test_rejects_non_positive_tolerance(self):
        """Tolerances must be positive."""
        with pytest.raises(ValueError):
            integrate_1d(math.sin, 0.0, 1.0, rel_tol=0.0)


class TestIntegrateNd:
    """Nested adaptive quadrature."""

    def test_two_dimensional_polynomial(self):
        """Product of coordinates over the unit square."""
        res = integrate_nd(lambda x, y: x * y, Domain.box((0.0, 1.0), (0.0, 1.0)))
        assert res.value == pytest.approx(0.25, rel=1e-10)
        assert res.method is QuadratureMethod.NESTED_2D

    def test_three_dimensional_gaussian(self):
        """Octant Gaussian in three dimensions."""
        tail = Bound(lower=0.0, upper=math.inf, transform=Transform.EXPONENTIAL)
        domain = Domain(bounds=(tail, tail, tail))
        res = integrate_nd(lambda x, y, z: math.exp(-(x * x + y * y + z * z)), domain, rel_tol=1e-7)
        assert res.value == pytest.approx(HALF_GAUSSIAN**3, rel=1e-6)
        assert res.method is QuadratureMethod.NESTED_3D

    def test_outer_variable_first(self):
        """The first argument is the outer variable."""
        # ∫₀¹ dx ∫₀² dy x²
        res = integrate_nd(lambda x, y: x * x, Domain.box((0.0, 1.0), (0.0, 2.0)))
        assert res.value == pytest.approx(2.0 / 3.0, rel=1e-10)

    def test_too_many_dimensions(self):
        """Nested quadrature stops at three dimensions."""
        with pytest.raises(UnsupportedDimensionError):
            integrate_nd(lambda *x: 1.0, Domain.box(*[(0.0, 1.0)] * 4))


class TestProductRule:
    """Fixed-order Gauss–Legendre tensor rule."""

    def test_exact_for_polynomials(self):
        """Four nodes integrate a degree-four product exactly."""
        res = gauss_legendre_product(
            lambda pts: pts[:, 0] ** 2 * pts[:, 1] ** 2,
            Domain.box((0.0, 1.0), (0.0, 1.0)),
            (4, 4),
        )
        assert res.value == pytest.approx(1.0 / 9.0, rel=1e-13)
        assert res.abs_error_estimate < 1e-13
        assert res.method is QuadratureMethod.FIXED_ORDER

    def test_node_count_must_match(self):
        """One node count per dimension."""
        with pytest.raises(ValueError):
            gauss_legendre_product(lambda pts: pts[:, 0], Domain.box((0.0, 1.0)), (4, 4))

    def test_non_finite_values(self):
        """Non-finite integrand values are rejected."""
        with pytest.raises(IntegrandNaNError):
            gauss_legendre_product(lambda pts: np.full(len(pts), np.nan), Domain.box((0.0, 1.0)), (3,))


class TestDomain:
    """Interval validation."""

    def test_reversed_bounds(self):
        """Lower bound must be below upper bound."""
        with pytest.raises(ValidationError):
            Bound(lower=1.0, upper=0.0)

    def test_infinite_needs_transform(self):
        """Infinite bounds need a transform."""
        with pytest.raises(ValidationError):
            Bound(lower=0.0, upper=math.inf, transform=Transform.NONE)

    def test_at_most_six_dimensions(self):
        """Domains have at most six dimensions."""
        with pytest.raises(ValidationError):
            Domain.box(*[(0.0, 1.0)] * 7)
