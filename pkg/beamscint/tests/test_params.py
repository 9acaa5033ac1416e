"""
Tests for channel parameters and regime diagnostics.
"""

import math

import pytest
from pydantic import ValidationError
from scipy.constants import c

from beamscint.src.physics.params import (
    DerivedParams,
    PhysicalParams,
    cn2_for_sigma1_sq,
    derive_params,
    effective_radius,
    sigma1_sq_for,
    validate_regime,
)

from .channels import fig1_params


class TestPhysicalParams:
    """Validation of the user-facing parameters."""

    def test_infinite_scales_accepted(self):
        """L0 and λc may be infinite."""
        p = PhysicalParams(cn2=1e-14, l0=6.3e-3, L0=math.inf, q0=1e7, z=1000, r0=0.01, lambda_c=math.inf)
        assert math.isinf(p.L0)
        assert math.isinf(p.lambda_c)

    def test_zero_cn2_is_vacuum(self):
        """Cn² = 0 is a valid vacuum channel."""
        p = PhysicalParams(cn2=0.0, l0=6.3e-3, q0=1e7, z=1000, r0=0.01)
        assert derive_params(p).sigma1_sq == 0.0

    @pytest.mark.parametrize("field", ["cn2", "l0", "q0", "z", "r0"])
    def test_negative_values_rejected(self, field):
        """Negative values are rejected naming the field."""
        values = {"cn2": 1e-14, "l0": 6.3e-3, "q0": 1e7, "z": 1000.0, "r0": 0.01}
        values[field] = -1.0
        with pytest.raises(ValidationError) as info:
            PhysicalParams(**values)
        assert field in str(info.value)

    def test_non_finite_distance_rejected(self):
        """Distance must be finite."""
        with pytest.raises(ValidationError):
            PhysicalParams(cn2=1e-14, l0=6.3e-3, q0=1e7, z=math.inf, r0=0.01)

    def test_inner_scale_below_outer_scale(self):
        """The inner scale must be smaller than the outer scale."""
        with pytest.raises(ValidationError):
            PhysicalParams(cn2=1e-14, l0=1.0, L0=0.5, q0=1e7, z=1000, r0=0.01)


class TestDerivedParams:
    """Derived dimensionless scales."""

    def test_rytov_variance(self):
        """σ1² = 1.23 Cn² q0^(7/6) z^(11/6)."""
        p = PhysicalParams(cn2=1e-14, l0=6.3e-3, q0=1e7, z=1000, r0=0.01)
        d = derive_params(p)
        assert d.sigma1_sq == pytest.approx(1.23e-14 * 1e7 ** (7 / 6) * 1000 ** (11 / 6), rel=1e-12)

    def test_fresnel_parameters(self):
        """Fresnel parameters, time of flight and carrier frequency."""
        p = PhysicalParams(cn2=1e-14, l0=6.3e-3, q0=1e7, z=1000, r0=0.01)
        d = derive_params(p)
        assert d.rho0_sq == pytest.approx(1e-4 * 1e7 / 1000)
        assert d.rho1_sq == d.rho0_sq
        assert d.r1 == p.r0
        assert d.t == pytest.approx(1000 / c)
        assert d.omega0 == pytest.approx(c * 1e7)
        assert d.inner_scale_term == pytest.approx(1e7 * 6.3e-3**2 / (4 * math.pi**2 * 1000))

    def test_phase_diffuser_shrinks_radius(self):
        """A phase diffuser shortens r1."""
        assert effective_radius(0.01, 0.01) == pytest.approx(0.01 / math.sqrt(3.0))
        assert effective_radius(0.01, math.inf) == 0.01

    def test_diffuser_enters_rho1_only(self):
        """The diffuser changes ρ1² and leaves ρ0² alone."""
        p = PhysicalParams(cn2=1e-14, l0=6.3e-3, q0=1e7, z=1000, r0=0.01, lambda_c=0.01)
        d = derive_params(p)
        assert d.rho1_sq == pytest.approx(d.rho0_sq / 3.0)

    def test_cn2_inverse(self):
        """Cn² for a target σ1² maps back to it."""
        cn2 = cn2_for_sigma1_sq(0.4, 1.29e7, 1200.0)
        assert sigma1_sq_for(cn2, 1.29e7, 1200.0) == pytest.approx(0.4, rel=1e-12)

    def test_derive_is_pure(self):
        """Deriving twice gives equal results."""
        p = fig1_params(0.2)
        assert derive_params(p) == derive_params(p)


class TestRegime:
    """Regime diagnostics never raise, they report."""

    def test_weak_turbulence(self):
        """Weak turbulence passes every check."""
        p = fig1_params(0.2)
        report = validate_regime(derive_params(p), p)
        assert report.within_rytov
        assert report.within_moderate
        assert report.time_hierarchy_ok
        assert report.messages == []

    def test_moderate_turbulence(self):
        """Moderate turbulence leaves the Rytov range with one message."""
        p = fig1_params(0.5)
        report = validate_regime(derive_params(p), p)
        assert not report.within_rytov
        assert report.within_moderate
        assert len(report.messages) == 1

    def test_beyond_moderate(self):
        """Beyond σ1² = 0.85 is reported."""
        p = fig1_params(0.9)
        report = validate_regime(derive_params(p), p)
        assert not report.within_moderate
        assert any("moderate" in m for m in report.messages)

    def test_boundary_is_inclusive(self):
        """σ1² = 0.85 still counts as moderate."""
        p = fig1_params(0.2)
        d = derive_params(p).model_copy(update={"sigma1_sq": 0.85})
        assert validate_regime(d, p).within_moderate

    def test_time_hierarchy_reads_derived_time(self):
        """The hierarchy check uses t carried on DerivedParams."""
        p = fig1_params(0.2)
        d = derive_params(p)
        short = d.model_copy(update={"t": d.t * 1e-12})
        report = validate_regime(short, p)
        assert validate_regime(d, p).time_hierarchy_ok
        assert not report.time_hierarchy_ok
        assert any("time hierarchy" in m for m in report.messages)

    def test_derived_params_are_frozen(self):
        """Derived parameters are immutable."""
        d = derive_params(fig1_params())
        assert isinstance(d, DerivedParams)
        with pytest.raises(ValidationError):
            d.sigma1_sq = 1.0
