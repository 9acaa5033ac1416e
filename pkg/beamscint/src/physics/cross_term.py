"""
Second-order cross term x2 = 2⟨δI₁δI₂⟩/I₀² on axis.

A refractive-index mode κ at distance z″ perturbs the photon density; once
the q⊥ and aperture sums are done in closed form, its contribution to the
normalized intensity at transverse position ρ on the detector plane is the
kernel D(κ; ρ) (see :func:`fluctuation_kernel`). The second-order
fluctuation δI₂ is the collision integral acting on δI₁ between z″ and the
detector, which displaces the observation point by ρ = k′(z − z′)/q0:

    x2 = −8π²q0⁴ ∫₀^z dz′ ∫₀^{z′} dz″ ∫d²k′ ψ(k′) ∫d²κ ψ(κ)
             Re[D(κ;0) · conj(D(κ;0) − D(κ;ρ))]

The same kernel reproduces σ1²·L through
2πq0² ∫₀^z dz″ ∫d²κ ψ(κ) |D(κ;0)|², which pins the normalization.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
import structlog
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import InternalConsistencyError, ParameterError
from ..numerics.models import (
    Domain,
    FloatArray,
    ImportanceKind,
    ImportanceSpec,
    McOptions,
    QuadratureMethod,
    QuadratureResult,
)
from ..numerics.montecarlo import mc_integrate
from ..numerics.quadrature import gauss_legendre_product, integrate_nd
from .beam import BeamBoundary
from .params import DerivedParams, PhysicalParams
from .spectrum import SpectrumParams, normalized_psi, psi_scale

logger = structlog.get_logger(__name__).bind(component="cross-term")

ComplexArray = npt.NDArray[np.complex128]
Band = tuple[float, float]

# radial limits in units of 2π/l0
K_MAX = 6.0
RADIAL_EXPONENT = 2.0 / 3.0
PRECISION_TARGET = 0.02
IMAGINARY_TOLERANCE = 1e-10
EXPM1_RANGE = 1.0
DEFAULT_QUADRATURE_NODES = (8, 8, 16, 16, 16)


class CrossTermResult(BaseModel):
    """Cross term with the integration record and the seed that produced it."""

    model_config = ConfigDict(frozen=True)

    x2_ratio: float
    quad: QuadratureResult
    sample_seed: int | None = Field(default=None, ge=0, lt=2**64)
    precision_ok: bool = True

    @field_validator("x2_ratio")
    @classmethod
    def _check_finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("x2_ratio must be finite")
        return value


class KernelTerms(NamedTuple):
    """Pieces of D(κ; ρ) = T₊·exp(Q + L₊) − T₋·exp(Q + L₋).

    T± = exp(log_t_plus / log_t_minus) carry the ρ-independent exponent,
    Q = −γ|ρ|² and L± are linear in ρ. Re(log T± + Q ± L±) ≤ −κ²v²/4A, so
    the combined exponent never overflows even when L± alone does.
    """

    log_t_plus: ComplexArray
    log_t_minus: ComplexArray
    quadratic: FloatArray
    l_plus: ComplexArray
    l_minus: ComplexArray

    @property
    def t_plus(self) -> ComplexArray:
        return np.exp(self.log_t_plus)

    @property
    def t_minus(self) -> ComplexArray:
        return np.exp(self.log_t_minus)


def kernel_terms(
    kappa: npt.ArrayLike,
    rho_x: npt.ArrayLike,
    rho_y: npt.ArrayLike,
    screen: npt.ArrayLike,
    b: BeamBoundary,
    z: float,
) -> KernelTerms:
    """Split the kernel of a mode κ·x̂ at distance ``screen`` seen at (ρx, ρy) at ``z``.

    With s = z/q0, s″ = screen/q0, v = s − s″, A = a + b s² and γ = ab/A:

        log T± = −κ²v²(1 + ab)/4A ∓ iκ²v(a + b s s″)/2A
        L± = ±γκvρx + iκρx(a + b s s″)/A
    """
    k = np.asarray(kappa, dtype=np.float64)
    rx = np.asarray(rho_x, dtype=np.float64)
    ry = np.asarray(rho_y, dtype=np.float64)
    s = z / b.q0
    s_screen = np.asarray(screen, dtype=np.float64) / b.q0
    v = s - s_screen
    A = b.spread(z)
    gamma = b.gamma(z)
    focus = (b.a + b.b * s * s_screen) / A
    decay = -k * k * v * v * (1.0 + b.a * b.b) / (4.0 * A)
    theta = 0.5 * k * k * v * focus
    drift = gamma * k * v * rx
    phase = 1j * k * rx * focus
    return KernelTerms(
        log_t_plus=decay - 1j * theta,
        log_t_minus=decay + 1j * theta,
        quadratic=-gamma * (rx * rx + ry * ry),
        l_plus=drift + phase,
        l_minus=-drift + phase,
    )


def fluctuation_kernel(
    kappa: npt.ArrayLike,
    rho_x: npt.ArrayLike,
    rho_y: npt.ArrayLike,
    screen: npt.ArrayLike,
    b: BeamBoundary,
    z: float,
) -> ComplexArray:
    """D(κ; ρ), the normalized on-detector response to one index mode.

    It is the phase-screen difference of the free-streamed boundary PDF
    taken at q⊥ ∓ κ/2, summed over q⊥ and divided by the on-axis vacuum
    intensity. At ρ = 0 it reduces to −2i·exp(−κ²v²(1 + ab)/4A)·sin θ.
    """
    terms = kernel_terms(kappa, rho_x, rho_y, screen, b, z)
    return np.exp(terms.log_t_plus + terms.quadratic + terms.l_plus) - np.exp(
        terms.log_t_minus + terms.quadratic + terms.l_minus
    )


def _symmetric_excess(log_t: ComplexArray, quadratic: FloatArray, linear: ComplexArray) -> ComplexArray:
    """T·(exp(Q + L) + exp(Q − L) − 2) with T = exp(log_t).

    The expm1 form is exact to rounding for small Q and L; elsewhere each
    exponential is taken with log T folded in.
    """
    small = (np.abs(quadratic) < EXPM1_RANGE) & (np.abs(linear) < EXPM1_RANGE)
    q_near = np.where(small, quadratic, 0.0)
    l_near = np.where(small, linear, 0.0)
    half = np.sinh(0.5 * l_near)
    near = 2.0 * np.exp(log_t) * (np.expm1(q_near) * np.cosh(l_near) + 2.0 * half * half)
    q_far = np.where(small, 0.0, quadratic)
    l_far = np.where(small, 0.0, linear)
    far = np.exp(log_t + q_far + l_far) + np.exp(log_t + q_far - l_far) - 2.0 * np.exp(log_t)
    return np.where(small, near, far)


def _response_parts(terms: KernelTerms) -> tuple[ComplexArray, ComplexArray, ComplexArray]:
    d0 = terms.t_plus - terms.t_minus
    gain_plus = _symmetric_excess(terms.log_t_plus, terms.quadratic, terms.l_plus)
    gain_minus = _symmetric_excess(terms.log_t_minus, terms.quadratic, terms.l_minus)
    return d0, gain_plus, gain_minus


def displacement_response(
    kappa: npt.ArrayLike,
    rho_x: npt.ArrayLike,
    rho_y: npt.ArrayLike,
    screen: npt.ArrayLike,
    b: BeamBoundary,
    z: float,
) -> ComplexArray:
    """D(κ;0)·conj(2D(κ;0) − D(κ;ρ) − D(κ;−ρ)), the cross-term integrand of one mode.

    Real up to rounding; second order in ρ near ρ = 0.
    """
    d0, gain_plus, gain_minus = _response_parts(kernel_terms(kappa, rho_x, rho_y, screen, b, z))
    return d0 * np.conj(gain_minus - gain_plus)


def _scale(p: PhysicalParams, s: SpectrumParams) -> float:
    """q0² z ψ_scale (2π/l0)²: one power of the turbulence strength."""
    return p.q0**2 * p.z * psi_scale(s) * s.inner_wavenumber**2


def _check_bands(bands: tuple[Band, Band] | None) -> tuple[Band, Band]:
    if bands is None:
        return (0.0, K_MAX), (0.0, K_MAX)
    for lo, hi in bands:
        if not 0.0 <= lo < hi <= K_MAX:
            raise ParameterError("bands", f"each band must satisfy 0 <= lo < hi <= {K_MAX}")
    return bands[0], bands[1]


def _integrand(p: PhysicalParams, d: DerivedParams) -> Callable[[FloatArray], FloatArray]:
    """Vectorized integrand over (z′/z, z″/z′, k′l0/2π, κl0/2π, φ ∈ [0, π))."""
    s = SpectrumParams.from_physical(p)
    b = BeamBoundary.from_params(p, d)
    k_l = s.inner_wavenumber
    z = p.z

    def f(points: FloatArray) -> FloatArray:
        t, r, x, y, phi = points.T
        kappa = y * k_l
        screen = r * t * z
        reach = x * k_l * (z - t * z) / p.q0
        rho_x = reach * np.cos(phi)
        rho_y = reach * np.sin(phi)
        # D(0) − D(ρ) + D(0) − D(−ρ), second order in ρ
        d0, gain_plus, gain_minus = _response_parts(kernel_terms(kappa, rho_x, rho_y, screen, b, z))
        pair = d0 * np.conj(gain_minus - gain_plus)
        magnitude = float(np.sum(np.abs(d0) * (np.abs(gain_plus) + np.abs(gain_minus))))
        residual = abs(float(np.sum(pair.imag)))
        if residual > IMAGINARY_TOLERANCE * magnitude:
            raise InternalConsistencyError(
                f"cross-term integrand keeps an imaginary part {residual:.3g} "
                f"against {magnitude:.3g}"
            )
        weight = t * x * normalized_psi(x, s) * y * normalized_psi(y, s)
        return weight * pair.real

    return f


def _domain(bands: tuple[Band, Band]) -> Domain:
    return Domain.box((0.0, 1.0), (0.0, 1.0), bands[0], bands[1], (0.0, math.pi))


def _prefactor(p: PhysicalParams, s: SpectrumParams) -> float:
    return -16.0 * math.pi**3 * _scale(p, s) ** 2


def cross_term_ratio(
    d: DerivedParams,
    p: PhysicalParams,
    opts: McOptions,
    bands: tuple[Band, Band] | None = None,
    *,
    workers: int = 1,
) -> CrossTermResult:
    """x2 by stratified Monte Carlo over five dimensions.

    z″ = v·z′ keeps the screen before the collision; both radial variables
    use a power-law proposal on ``bands`` (units of 2π/l0, default [0, 6]);
    each azimuth φ is paired with φ + π, which makes the sum real.
    """
    band_k, band_kappa = _check_bands(bands)
    s = SpectrumParams.from_physical(p)
    if s.cn2 == 0.0:
        quad = QuadratureResult(
            value=0.0, abs_error_estimate=0.0, evaluations=1, method=QuadratureMethod.MONTE_CARLO
        )
        return CrossTermResult(x2_ratio=0.0, quad=quad, sample_seed=opts.seed)

    importance = tuple(
        ImportanceSpec(kind=ImportanceKind.POWER_LAW_RADIAL, dims=(dim,), exponent=RADIAL_EXPONENT)
        for dim in (2, 3)
    )
    run = opts.model_copy(update={"importance": importance})
    raw = mc_integrate(_integrand(p, d), _domain((band_k, band_kappa)), run, workers=workers)
    quad = raw.scaled(_prefactor(p, s))
    precision_ok = quad.abs_error_estimate <= PRECISION_TARGET * abs(quad.value)
    if not precision_ok:
        logger.warning(
            "Cross term above precision target",
            x2_ratio=quad.value,
            std_error=quad.abs_error_estimate,
            samples=quad.evaluations,
        )
    return CrossTermResult(
        x2_ratio=quad.value, quad=quad, sample_seed=opts.seed, precision_ok=precision_ok
    )


def cross_term_ratio_quadrature(
    d: DerivedParams,
    p: PhysicalParams,
    bands: tuple[Band, Band] | None = None,
    nodes: tuple[int, int, int, int, int] = DEFAULT_QUADRATURE_NODES,
) -> CrossTermResult:
    """x2 by a fixed-order product rule over the (z′, z″) and (k′, κ, φ) blocks.

    Meant for shrunken instances (narrow bands, short paths) where a few
    nodes per dimension resolve the integrand.
    """
    band_k, band_kappa = _check_bands(bands)
    s = SpectrumParams.from_physical(p)
    raw = gauss_legendre_product(_integrand(p, d), _domain((band_k, band_kappa)), nodes)
    quad = raw.scaled(_prefactor(p, s))
    return CrossTermResult(x2_ratio=quad.value, quad=quad)


def first_order_covariance(
    d: DerivedParams, p: PhysicalParams, rel_tol: float = 1e-6
) -> QuadratureResult:
    """2πq0² ∫₀^z dz″ ∫d²κ ψ(κ) |D(κ;0)|², the first-order σ² from the kernel."""
    s = SpectrumParams.from_physical(p)
    b = BeamBoundary.from_params(p, d)
    k_l = s.inner_wavenumber

    def integrand(r: float, y: float) -> float:
        kernel = complex(fluctuation_kernel(y * k_l, 0.0, 0.0, r * p.z, b, p.z))
        return y * float(normalized_psi(y, s)) * (kernel.real**2 + kernel.imag**2)

    raw = integrate_nd(integrand, Domain.box((0.0, 1.0), (0.0, K_MAX)), rel_tol, 1e-300)
    return raw.scaled(4.0 * math.pi**2 * _scale(p, s))
