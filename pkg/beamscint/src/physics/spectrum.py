"""
Von Karman refractive-index spectrum and the collision-rate estimate.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, overload

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field
from scipy.constants import c as SPEED_OF_LIGHT

from ..errors import ParameterError, SingularInputError

if TYPE_CHECKING:
    from .params import PhysicalParams

VON_KARMAN_PREFACTOR = 0.033

FloatArray = npt.NDArray[np.float64]


class SpectrumParams(BaseModel):
    """Parameters of the von Karman spectrum."""

    model_config = ConfigDict(frozen=True)

    cn2: float = Field(ge=0.0)
    l0: float = Field(gt=0.0)
    inv_L0_sq: float = Field(default=0.0, ge=0.0)

    @classmethod
    def from_physical(cls, p: PhysicalParams) -> SpectrumParams:
        inv_L0_sq = 0.0 if math.isinf(p.L0) else 1.0 / p.L0**2
        return cls(cn2=p.cn2, l0=p.l0, inv_L0_sq=inv_L0_sq)

    @property
    def inner_wavenumber(self) -> float:
        """2π/l0, the wavenumber of the smallest eddies."""
        return 2.0 * math.pi / self.l0

    def scaled(self, factor: float) -> SpectrumParams:
        """Copy with Cn² multiplied by ``factor``."""
        return self.model_copy(update={"cn2": self.cn2 * factor})


@overload
def psi(k: float, s: SpectrumParams) -> float: ...


@overload
def psi(k: FloatArray, s: SpectrumParams) -> FloatArray: ...


def psi(k: float | FloatArray, s: SpectrumParams) -> float | FloatArray:
    """ψ(k) = 0.033 Cn² exp(−(k l0/2π)²) / (k² + L0⁻²)^{11/6}, in m³."""
    k_arr = np.asarray(k, dtype=np.float64)
    if np.any(k_arr < 0):
        raise ParameterError("k", "wavenumber must be non-negative")
    if s.inv_L0_sq == 0.0 and np.any(k_arr == 0):
        raise SingularInputError("psi(k=0) diverges for an infinite outer scale")
    cutoff = np.exp(-((k_arr * s.l0 / (2.0 * math.pi)) ** 2))
    value = VON_KARMAN_PREFACTOR * s.cn2 * cutoff / (k_arr**2 + s.inv_L0_sq) ** (11.0 / 6.0)
    if np.ndim(k) == 0:
        return float(value)
    return value


def collision_frequency(s: SpectrumParams, omega0: float, k_char: float) -> float:
    """Estimate ν ≈ (2πω0²/c) ψ(k′) k′² at a characteristic momentum transfer."""
    if k_char <= 0:
        raise ParameterError("k_char", "must be strictly positive")
    return 2.0 * math.pi * omega0**2 / SPEED_OF_LIGHT * psi(k_char, s) * k_char**2


def psi_scale(s: SpectrumParams) -> float:
    """ψ of the bare power law at the inner wavenumber: 0.033 Cn² (2π/l0)^{−11/3}."""
    return VON_KARMAN_PREFACTOR * s.cn2 * s.inner_wavenumber ** (-11.0 / 3.0)


def normalized_psi(x: float | FloatArray, s: SpectrumParams) -> float | FloatArray:
    """ψ(x·2π/l0)/psi_scale(s); independent of Cn², finite at x = 0 only when L0 is."""
    x_arr = np.asarray(x, dtype=np.float64)
    outer = s.inv_L0_sq / s.inner_wavenumber**2
    value = np.exp(-x_arr * x_arr) / (x_arr * x_arr + outer) ** (11.0 / 6.0)
    if np.ndim(x) == 0:
        return float(value)
    return value
