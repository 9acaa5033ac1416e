"""
Collision-induced correction i1 = I₁(0,z)/I₀(0,z) to the on-axis intensity.

A collision at distance z′ moves a photon sideways by ρ = k′(z − z′)/q0 at
the detector, so the loss on axis is the vacuum beam minus the vacuum beam
displaced by ρ. With γ = ab/A and w = z − z′:

    i1 = −4π²q0² ∫₀^z dw ∫₀^{k_max} k′ψ(k′) [1 − exp(−γ k′² w²/q0²)] dk′

Integrals are carried out in x = k′l0/2π and w/z so that the integrands are
of order one; Cn² enters only as an overall factor.
"""

from __future__ import annotations

import math

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict
from scipy import special

from ..errors import InternalConsistencyError
from ..numerics.models import (
    Bound,
    Domain,
    FloatArray,
    ImportanceKind,
    ImportanceSpec,
    McOptions,
    QuadratureMethod,
    QuadratureResult,
    Transform,
)
from ..numerics.montecarlo import mc_integrate
from ..numerics.quadrature import integrate_nd
from .beam import BeamBoundary
from .params import MODERATE_LIMIT, DerivedParams, PhysicalParams
from .spectrum import SpectrumParams, normalized_psi, psi_scale

logger = structlog.get_logger(__name__).bind(component="mean-intensity-correction")

# k′ upper limit in units of 2π/l0
K_MAX = 6.0
RADIAL_EXPONENT = 2.0 / 3.0
_SMALL_ARGUMENT = 1e-2


class IntensityCorrection(BaseModel):
    """On-axis mean-intensity correction and how it was integrated."""

    model_config = ConfigDict(frozen=True)

    i1_ratio: float
    quad: QuadratureResult


def _prefactor(p: PhysicalParams, s: SpectrumParams) -> float:
    """4π² q0² z ψ_scale (2π/l0)², so that i1 = −prefactor · (dimensionless integral)."""
    return 4.0 * math.pi**2 * p.q0**2 * p.z * psi_scale(s) * s.inner_wavenumber**2


def _mu(p: PhysicalParams, b: BeamBoundary, s: SpectrumParams) -> float:
    """γ (2π/l0)² z²/q0², the squared displacement scale in x and w/z."""
    return b.gamma(p.z) * (s.inner_wavenumber * p.z / p.q0) ** 2


def _zero(method: QuadratureMethod) -> IntensityCorrection:
    quad = QuadratureResult(value=0.0, abs_error_estimate=0.0, evaluations=1, method=method)
    return IntensityCorrection(i1_ratio=0.0, quad=quad)


def _finish(
    raw: QuadratureResult, p: PhysicalParams, s: SpectrumParams, *, check_sign: bool
) -> IntensityCorrection:
    quad = raw.scaled(-_prefactor(p, s))
    if check_sign and quad.value > 0.0:
        raise InternalConsistencyError(f"positive intensity correction {quad.value:.6g}")
    return IntensityCorrection(i1_ratio=quad.value, quad=quad)


def _warn_regime(d: DerivedParams) -> None:
    if d.sigma1_sq > MODERATE_LIMIT:
        logger.warning(
            "Intensity correction beyond the moderate regime",
            sigma1_sq=d.sigma1_sq,
            limit=MODERATE_LIMIT,
        )


def intensity_correction_ratio(
    d: DerivedParams, p: PhysicalParams, rel_tol: float = 1e-6
) -> IntensityCorrection:
    """Reduced evaluation: nested adaptive quadrature over (w/z, x)."""
    _warn_regime(d)
    s = SpectrumParams.from_physical(p)
    if s.cn2 == 0.0:
        return _zero(QuadratureMethod.NESTED_2D)
    mu = _mu(p, BeamBoundary.from_params(p, d), s)
    outer_sq = s.inv_L0_sq / s.inner_wavenumber**2

    def integrand(w: float, x: float) -> float:
        x2 = x * x
        spectrum = math.exp(-x2) / (x2 + outer_sq) ** (11.0 / 6.0)
        return -x * spectrum * math.expm1(-mu * x2 * w * w)

    raw = integrate_nd(integrand, Domain.box((0.0, 1.0), (0.0, K_MAX)), rel_tol, 1e-300)
    result = _finish(raw, p, s, check_sign=True)
    logger.debug("Intensity correction", i1_ratio=result.i1_ratio, mu=mu)
    return result


def _one_minus_mean_j0(X: float) -> float:
    """1 − ∫₀¹ J0(Xw) dw."""
    if X < _SMALL_ARGUMENT:
        X2 = X * X
        return X2 / 12.0 - X2 * X2 / 320.0
    return 1.0 - float(special.itj0y0(X)[0]) / X


def intensity_correction_ratio_sinc(
    d: DerivedParams, p: PhysicalParams, rel_tol: float = 1e-6
) -> IntensityCorrection:
    """Independent path: the distance integral done first, in closed form.

    Writing the displaced Gaussian as a Hankel transform turns the w
    integral into the azimuthally averaged sinc 1 − ∫₀¹J0(Xw)dw, leaving a
    2D integral over x and the Gaussian's conjugate variable y.
    """
    _warn_regime(d)
    s = SpectrumParams.from_physical(p)
    if s.cn2 == 0.0:
        return _zero(QuadratureMethod.NESTED_2D)
    root_mu = math.sqrt(_mu(p, BeamBoundary.from_params(p, d), s))
    outer_sq = s.inv_L0_sq / s.inner_wavenumber**2

    def integrand(x: float, y: float) -> float:
        x2 = x * x
        spectrum = math.exp(-x2) / (x2 + outer_sq) ** (11.0 / 6.0)
        return x * spectrum * 2.0 * y * math.exp(-y * y) * _one_minus_mean_j0(2.0 * root_mu * x * y)

    domain = Domain(
        bounds=(
            Bound(lower=0.0, upper=K_MAX),
            Bound(lower=0.0, upper=math.inf, transform=Transform.EXPONENTIAL),
        )
    )
    raw = integrate_nd(integrand, domain, rel_tol, 1e-300)
    return _finish(raw, p, s, check_sign=True)


def intensity_correction_ratio_mc(
    d: DerivedParams, p: PhysicalParams, opts: McOptions, *, workers: int = 1
) -> IntensityCorrection:
    """Brute-force path: Monte Carlo over (z′, k′, azimuth, q⊥) of the unreduced loss.

    Each sample draws q⊥ from a Gaussian mixture centred on the undisturbed
    beam and on the two kicked beams (±k′), and evaluates the pair k′, −k′
    together so that the part odd in k′ cancels sample by sample.
    """
    s = SpectrumParams.from_physical(p)
    if s.cn2 == 0.0:
        return _zero(QuadratureMethod.MONTE_CARLO)
    b = BeamBoundary.from_params(p, d)
    A = b.spread(p.z)
    total = p.z / p.q0
    k_l = s.inner_wavenumber
    sigma_q = 1.0 / math.sqrt(2.0 * A)
    density_norm = A / math.pi

    def integrand(points: FloatArray) -> FloatArray:
        t, x, phi, u_mix, u_angle = points.T
        kx = x * k_l * np.cos(phi)
        ky = x * k_l * np.sin(phi)
        shift = (b.a + b.b * total * total * t) / A
        cx, cy = -kx * shift, -ky * shift

        branch = np.where(u_mix < 0.5, 0, np.where(u_mix < 0.75, 1, 2))
        u_rad = np.where(branch == 0, 2.0 * u_mix, 4.0 * (u_mix - np.where(branch == 1, 0.5, 0.75)))
        u_rad = np.clip(u_rad, 2.0**-60, 1.0 - 2.0**-53)
        radius = sigma_q * np.sqrt(-2.0 * np.log1p(-u_rad))
        sign = np.where(branch == 2, -1.0, np.where(branch == 1, 1.0, 0.0))
        qx = sign * cx + radius * np.cos(2.0 * np.pi * u_angle)
        qy = sign * cy + radius * np.sin(2.0 * np.pi * u_angle)

        def gaussian(ox: FloatArray, oy: FloatArray) -> FloatArray:
            return np.exp(-A * ((qx - ox) ** 2 + (qy - oy) ** 2))

        density = density_norm * (
            0.5 * gaussian(0.0, 0.0) + 0.25 * gaussian(cx, cy) + 0.25 * gaussian(-cx, -cy)
        )
        q_sq = qx * qx + qy * qy
        direct = np.exp(-A * q_sq)

        def kicked(sx: FloatArray, sy: FloatArray) -> FloatArray:
            px, py = qx + sx, qy + sy
            rx = qx * total + sx * total * t
            ry = qy * total + sy * total * t
            return np.exp(-b.a * (px * px + py * py) - b.b * (rx * rx + ry * ry))

        loss = 2.0 * direct - kicked(kx, ky) - kicked(-kx, -ky)
        spectrum = normalized_psi(x, s)
        return x * spectrum * loss / density * density_norm / (2.0 * math.pi)

    domain = Domain.box((0.0, 1.0), (0.0, K_MAX), (0.0, math.pi), (0.0, 1.0), (0.0, 1.0))
    importance = ImportanceSpec(
        kind=ImportanceKind.POWER_LAW_RADIAL, dims=(1,), exponent=RADIAL_EXPONENT
    )
    opts = opts.model_copy(update={"importance": (importance,)})
    raw = mc_integrate(integrand, domain, opts, workers=workers)
    result = _finish(raw, p, s, check_sign=False)
    logger.debug(
        "Monte Carlo intensity correction",
        i1_ratio=result.i1_ratio,
        std_error=result.quad.abs_error_estimate,
    )
    return result
