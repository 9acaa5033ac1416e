"""
Channel parameters, derived dimensionless scales and regime diagnostics.
"""

from __future__ import annotations

import math

import structlog
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.constants import c as SPEED_OF_LIGHT

from .spectrum import SpectrumParams, collision_frequency

logger = structlog.get_logger(__name__).bind(component="phys-params")

RYTOV_PREFACTOR = 1.23
PARAXIAL_THRESHOLD = 10.0
MODERATE_LIMIT = 0.85
RYTOV_LIMIT = 0.3
HIERARCHY_MARGIN = 0.1


class PhysicalParams(BaseModel):
    """User-facing description of the propagation channel (SI units)."""

    model_config = ConfigDict(frozen=True)

    cn2: float = Field(description="structure constant, m^(-2/3)")
    l0: float = Field(description="inner scale, m")
    L0: float = Field(default=math.inf, description="outer scale, m")
    q0: float = Field(description="central wavenumber, 1/m")
    z: float = Field(description="propagation distance, m")
    r0: float = Field(description="aperture radius, m")
    lambda_c: float = Field(default=math.inf, description="phase-diffuser coherence length, m")

    @field_validator("cn2")
    @classmethod
    def _check_cn2(cls, value: float) -> float:
        # Cn2 = 0 is the vacuum reference channel.
        if not math.isfinite(value) or value < 0:
            raise ValueError("cn2 must be finite and non-negative")
        return value

    @field_validator("l0", "q0", "z", "r0")
    @classmethod
    def _check_finite_positive(cls, value: float) -> float:
        if not math.isfinite(value) or value <= 0:
            raise ValueError("must be finite and strictly positive")
        return value

    @field_validator("L0", "lambda_c")
    @classmethod
    def _check_positive_or_inf(cls, value: float) -> float:
        if math.isnan(value) or value <= 0:
            raise ValueError("must be strictly positive (inf allowed)")
        return value

    @model_validator(mode="after")
    def _check_scales(self) -> PhysicalParams:
        if math.isfinite(self.L0) and self.l0 >= self.L0:
            raise ValueError("l0 must be smaller than L0")
        if self.q0 * self.r0 < PARAXIAL_THRESHOLD:
            logger.warning(
                "Paraxial sanity check failed",
                q0_r0=self.q0 * self.r0,
                threshold=PARAXIAL_THRESHOLD,
            )
        return self


class DerivedParams(BaseModel):
    """Scales computed once from PhysicalParams and consumed by every integrand."""

    model_config = ConfigDict(frozen=True)

    sigma1_sq: float
    rho0_sq: float
    rho1_sq: float
    r1: float
    t: float
    omega0: float
    inner_scale_term: float


class RegimeReport(BaseModel):
    """Validity diagnostics for the iteration scheme."""

    sigma1_sq: float
    within_moderate: bool
    within_rytov: bool
    time_hierarchy_ok: bool
    nu_t: float
    messages: list[str] = Field(default_factory=list)


def sigma1_sq_for(cn2: float, q0: float, z: float) -> float:
    """Rytov variance 1.23 Cn² q0^{7/6} z^{11/6}."""
    return RYTOV_PREFACTOR * cn2 * q0 ** (7.0 / 6.0) * z ** (11.0 / 6.0)


def cn2_for_sigma1_sq(sigma1_sq: float, q0: float, z: float) -> float:
    """Structure constant producing the requested Rytov variance."""
    return sigma1_sq / (RYTOV_PREFACTOR * q0 ** (7.0 / 6.0) * z ** (11.0 / 6.0))


def effective_radius(r0: float, lambda_c: float) -> float:
    """Partially coherent radius r1 = r0/sqrt(1 + 2 r0²/λc²)."""
    if math.isinf(lambda_c):
        return r0
    return r0 / math.sqrt(1.0 + 2.0 * r0**2 / lambda_c**2)


def derive_params(p: PhysicalParams) -> DerivedParams:
    """Compute the dimensionless scales of a channel."""
    r1 = effective_radius(p.r0, p.lambda_c)
    return DerivedParams(
        sigma1_sq=sigma1_sq_for(p.cn2, p.q0, p.z),
        rho0_sq=p.r0**2 * p.q0 / p.z,
        rho1_sq=r1**2 * p.q0 / p.z,
        r1=r1,
        t=p.z / SPEED_OF_LIGHT,
        omega0=SPEED_OF_LIGHT * p.q0,
        inner_scale_term=p.q0 * p.l0**2 / (4.0 * math.pi**2 * p.z),
    )


def validate_regime(d: DerivedParams, p: PhysicalParams) -> RegimeReport:
    """Flag where the channel sits relative to the weak and moderate regimes.

    The time hierarchy π/(c k′) ≪ t ≪ 1/ν is checked at k′ = 2π/l0 with a
    factor-of-ten margin on both sides.
    """
    messages: list[str] = []
    within_moderate = d.sigma1_sq <= MODERATE_LIMIT
    within_rytov = d.sigma1_sq < RYTOV_LIMIT
    if not within_moderate:
        messages.append(
            f"sigma1_sq={d.sigma1_sq:.4g} exceeds the moderate-turbulence bound {MODERATE_LIMIT}"
        )
    elif not within_rytov:
        messages.append(f"sigma1_sq={d.sigma1_sq:.4g} is beyond the Rytov range")

    k_char = 2.0 * math.pi / p.l0
    nu = collision_frequency(SpectrumParams.from_physical(p), d.omega0, k_char)
    nu_t = nu * d.t
    transit = math.pi / (SPEED_OF_LIGHT * k_char)
    time_hierarchy_ok = transit <= HIERARCHY_MARGIN * d.t and nu_t <= HIERARCHY_MARGIN
    if not time_hierarchy_ok:
        messages.append(
            f"time hierarchy violated: eddy transit/t={transit / d.t:.3g}, nu*t={nu_t:.3g}"
        )

    if messages:
        logger.warning("Regime diagnostics", sigma1_sq=d.sigma1_sq, messages=messages)
    return RegimeReport(
        sigma1_sq=d.sigma1_sq,
        within_moderate=within_moderate,
        within_rytov=within_rytov,
        time_hierarchy_ok=time_hierarchy_ok,
        nu_t=nu_t,
        messages=messages,
    )
