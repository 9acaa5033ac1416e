"""
First-order (Rytov-like) scintillation: the aperture-averaging double integral L.

    L = 4.24 ∫₀¹dτ ∫₀^∞dχ χ^{−8/3} exp(−β(τ)χ²) sin²(ω(τ)χ²/2)

with β(τ) = q0l0²/(4π²z) + τ²(ρ0² + ρ1²)/(4 + ρ0²ρ1²) and
ω(τ) = τ − 4τ²/(4 + ρ0²ρ1²). In u = χ² the inner integral becomes
(1/4)∫₀^∞ u^{−11/6} e^{−βu} (1 − cos ωu) du, which is what gets integrated.
"""

from __future__ import annotations

import math

import structlog
from pydantic import BaseModel, ConfigDict, model_validator
from scipy import special

from ..errors import ParameterError
from ..numerics.models import QuadratureMethod, QuadratureResult, Transform
from ..numerics.quadrature import integrate_1d
from .params import DerivedParams, PhysicalParams, derive_params

logger = structlog.get_logger(__name__).bind(component="scint-first-order")

PLANE_WAVE_NORMALIZATION = 4.24
RYTOV_LIMIT_BRACKET = 1e-12
MIN_REL_TOL = 1e-10
MAX_REL_TOL = 1e-2

# scaled variable where the oscillatory tail takes over
_TAIL_START = 20.0 * math.pi
_NEGLIGIBLE_EXPONENT = 60.0
_EXPONENT = -5.0 / 6.0


class FirstOrderResult(BaseModel):
    """L and σ1²·L with the quadrature record behind them."""

    model_config = ConfigDict(frozen=True)

    big_L: float
    sigma2_first: float
    quad: QuadratureResult

    @model_validator(mode="after")
    def _check(self) -> FirstOrderResult:
        if not (math.isfinite(self.big_L) and self.big_L >= 0.0):
            raise ValueError(f"big_L must be finite and non-negative, got {self.big_L}")
        return self


def check_rel_tol(rel_tol: float) -> None:
    if not MIN_REL_TOL < rel_tol < MAX_REL_TOL:
        raise ParameterError("rel_tol", f"must lie in ({MIN_REL_TOL:g}, {MAX_REL_TOL:g})")


def _geometry(d: DerivedParams) -> tuple[float, float]:
    product = d.rho0_sq * d.rho1_sq
    return (d.rho0_sq + d.rho1_sq) / (4.0 + product), 4.0 / (4.0 + product)


def bracket_coefficients(tau: float, d: DerivedParams) -> tuple[float, float]:
    """(β, ω) of the inner integral at outer coordinate τ."""
    damping, curvature = _geometry(d)
    beta = d.inner_scale_term + tau * tau * damping
    omega = tau - curvature * tau * tau
    return beta, omega


def inner_integral_closed_form(beta: float, omega: float) -> float:
    """(1/4)∫₀^∞ u^{−11/6} e^{−βu}(1 − cos ωu) du by analytic continuation of Γ."""
    if beta < 0 or omega < 0:
        raise ParameterError("beta/omega", "must be non-negative")
    if omega == 0.0:
        return 0.0
    g = special.gamma(_EXPONENT)
    modulus = math.hypot(beta, omega)
    phase = math.atan2(omega, beta)
    return 0.25 * g * (beta ** (-_EXPONENT) - modulus ** (-_EXPONENT) * math.cos(_EXPONENT * phase))


def _inner_integral(beta: float, omega: float, rel_tol: float) -> tuple[float, float, int]:
    if omega <= 0.0:
        return 0.0, 0.0, 1
    scale = max(beta, omega)
    rate = beta / scale
    freq = omega / scale

    def bulk(v: float) -> float:
        half = math.sin(0.5 * freq * v)
        return 2.0 * v ** (-11.0 / 6.0) * math.exp(-rate * v) * half * half

    head = integrate_1d(bulk, 0.0, _TAIL_START, rel_tol=rel_tol, abs_tol=1e-300)
    value = head.value
    error = head.abs_error_estimate
    evaluations = head.evaluations

    if rate * _TAIL_START < _NEGLIGIBLE_EXPONENT:
        tail_tol = max(rel_tol * abs(head.value), 1e-300)

        def envelope(v: float) -> float:
            return v ** (-11.0 / 6.0) * math.exp(-rate * v)

        smooth = integrate_1d(
            envelope,
            _TAIL_START,
            math.inf,
            rel_tol=rel_tol,
            abs_tol=tail_tol,
            transform=Transform.ALGEBRAIC,
            scale=_TAIL_START,
        )
        wave = integrate_1d(
            envelope,
            _TAIL_START,
            math.inf,
            rel_tol=rel_tol,
            abs_tol=tail_tol,
            oscillation=freq,
        )
        value += smooth.value - wave.value
        error += smooth.abs_error_estimate + wave.abs_error_estimate
        evaluations += smooth.evaluations + wave.evaluations

    factor = 0.25 * scale ** (-_EXPONENT)
    return factor * value, factor * error, evaluations


def big_L(
    d: DerivedParams, p: PhysicalParams | None = None, rel_tol: float = 1e-6
) -> FirstOrderResult:
    """Aperture-averaging factor L with τ outer and the u = χ² integral inner.

    When the whole damping bracket stays below 1e−12 the plane-wave Rytov
    limit L = 1 is returned instead of integrating an undamped integrand.
    If ``p`` is given it must describe the same channel as ``d``.
    """
    check_rel_tol(rel_tol)
    if p is not None:
        expected = derive_params(p)
        if not math.isclose(expected.rho0_sq, d.rho0_sq, rel_tol=1e-12) or not math.isclose(
            expected.rho1_sq, d.rho1_sq, rel_tol=1e-12
        ):
            raise ParameterError("d", "derived parameters do not belong to p")

    damping, _ = _geometry(d)
    if d.inner_scale_term + damping < RYTOV_LIMIT_BRACKET:
        logger.debug("Plane-wave Rytov limit", bracket=d.inner_scale_term + damping)
        quad = QuadratureResult(
            value=1.0, abs_error_estimate=0.0, evaluations=1, method=QuadratureMethod.ANALYTIC_LIMIT
        )
        return FirstOrderResult(big_L=1.0, sigma2_first=d.sigma1_sq, quad=quad)

    worst_inner = 0.0
    inner_evaluations = 0

    def outer(tau: float) -> float:
        nonlocal worst_inner, inner_evaluations
        beta, omega = bracket_coefficients(tau, d)
        value, error, evaluations = _inner_integral(beta, omega, rel_tol * 0.1)
        inner_evaluations += evaluations
        if value:
            worst_inner = max(worst_inner, error / abs(value))
        return value

    res = integrate_1d(outer, 0.0, 1.0, rel_tol=rel_tol, abs_tol=1e-300)
    value = PLANE_WAVE_NORMALIZATION * res.value
    error = PLANE_WAVE_NORMALIZATION * (res.abs_error_estimate + worst_inner * abs(res.value))
    quad = QuadratureResult(
        value=value,
        abs_error_estimate=error,
        evaluations=res.evaluations + inner_evaluations,
        method=QuadratureMethod.NESTED_2D,
    )
    value = max(value, 0.0)
    logger.debug("Computed L", big_L=value, error=error, evaluations=quad.evaluations)
    return FirstOrderResult(big_L=value, sigma2_first=d.sigma1_sq * value, quad=quad)


def sigma2_first_order(
    d: DerivedParams, p: PhysicalParams | None = None, rel_tol: float = 1e-6
) -> FirstOrderResult:
    """Rytov-like first-order scintillation σ1²·L."""
    return big_L(d, p, rel_tol)
