"""
Tests for the first-order (Rytov-like) scintillation.
"""

import math

import pytest
from pydantic import ValidationError

from beamscint.src.errors import ParameterError
from beamscint.src.numerics.models import QuadratureMethod, QuadratureResult
from beamscint.src.numerics.quadrature import integrate_1d
from beamscint.src.physics.first_order import (
    PLANE_WAVE_NORMALIZATION,
    FirstOrderResult,
    big_L,
    bracket_coefficients,
    check_rel_tol,
    inner_integral_closed_form,
    sigma2_first_order,
)
from beamscint.src.physics.params import DerivedParams, derive_params

from .channels import fig1_params, fig2_params


def plane_wave(inner_scale_term: float, rho_sq: float = 1e6) -> DerivedParams:
    return DerivedParams(
        sigma1_sq=0.1,
        rho0_sq=rho_sq,
        rho1_sq=rho_sq,
        r1=0.01,
        t=1e-6,
        omega0=3e15,
        inner_scale_term=inner_scale_term,
    )


def closed_form_L(d: DerivedParams) -> float:
    res = integrate_1d(
        lambda tau: inner_integral_closed_form(*bracket_coefficients(tau, d)),
        0.0,
        1.0,
        rel_tol=1e-10,
        abs_tol=1e-300,
    )
    return PLANE_WAVE_NORMALIZATION * res.value


class TestBigL:
    """Aperture-averaging factor."""

    def test_rytov_limit(self):
        """A huge aperture at negligible inner scale gives L = 1."""
        res = big_L(plane_wave(1e-8))
        assert res.big_L == pytest.approx(1.0, abs=0.01)
        assert res.quad.method is QuadratureMethod.NESTED_2D

    def test_analytic_limit_below_bracket(self):
        """Past the bracket threshold L is exactly one without quadrature."""
        res = big_L(plane_wave(0.0, rho_sq=1e20))
        assert res.big_L == 1.0
        assert res.quad.method is QuadratureMethod.ANALYTIC_LIMIT
        assert res.sigma2_first == pytest.approx(0.1)

    @pytest.mark.parametrize("z", [200.0, 600.0, 1000.0])
    def test_matches_closed_form(self, z):
        """Nested quadrature agrees with the closed-form inner integral."""
        d = derive_params(fig2_params(z=z))
        assert big_L(d, rel_tol=1e-7).big_L == pytest.approx(closed_form_L(d), rel=1e-5)

    def test_closed_form_plane_wave(self):
        """The closed-form route also reaches the plane-wave limit."""
        assert closed_form_L(plane_wave(0.0)) == pytest.approx(1.0, abs=1e-3)

    def test_aperture_averaging_reduces_scintillation(self, fig1):
        """A finite aperture averages scintillation below the Rytov value."""
        p, d = fig1
        res = big_L(d, p)
        assert 0.0 < res.big_L < 1.0
        assert res.quad.abs_error_estimate < 1e-3 * res.big_L

    def test_sigma2_first_order(self, fig1):
        """σ1²·L is the product of its factors."""
        p, d = fig1
        res = sigma2_first_order(d, p)
        assert res.sigma2_first == pytest.approx(d.sigma1_sq * res.big_L, rel=1e-14)

    def test_independent_of_cn2(self):
        """L depends on geometry only."""
        weak = derive_params(fig1_params(0.05))
        strong = derive_params(fig1_params(0.5))
        assert big_L(weak).big_L == pytest.approx(big_L(strong).big_L, rel=1e-12)

    def test_mismatched_params(self, fig1):
        """Derived and physical parameters must describe the same channel."""
        p, _ = fig1
        other = derive_params(fig2_params())
        with pytest.raises(ParameterError):
            big_L(other, p)


class TestInnerIntegral:
    """Closed-form inner integral."""

    def test_no_oscillation(self):
        """Zero phase curvature means zero contribution."""
        assert inner_integral_closed_form(0.3, 0.0) == 0.0

    def test_positive(self):
        """The inner integral is positive."""
        assert inner_integral_closed_form(0.1, 0.5) > 0.0

    def test_rejects_negative(self):
        """A negative damping coefficient is rejected."""
        with pytest.raises(ParameterError):
            inner_integral_closed_form(-1.0, 0.5)

    def test_brackets_at_ends(self):
        """Bracket coefficients at τ = 0 and τ = 1."""
        d = plane_wave(0.2)
        assert bracket_coefficients(0.0, d) == (0.2, 0.0)
        beta, omega = bracket_coefficients(1.0, d)
        assert beta == pytest.approx(0.2 + 2e6 / (4 + 1e12))
        assert omega == pytest.approx(1.0 - 4.0 / (4 + 1e12))


class TestTolerance:
    """Tolerance range and result validation."""

    @pytest.mark.parametrize("rel_tol", [1e-12, 0.1])
    def test_out_of_range(self, rel_tol):
        """Tolerances outside the supported range are rejected."""
        with pytest.raises(ParameterError):
            check_rel_tol(rel_tol)

    def test_negative_L_rejected(self):
        """A negative L cannot be stored."""
        quad = QuadratureResult(value=-1.0, abs_error_estimate=0.0, evaluations=1, method=QuadratureMethod.NESTED_2D)
        with pytest.raises(ValidationError):
            FirstOrderResult(big_L=-1.0, sigma2_first=-0.1, quad=quad)
