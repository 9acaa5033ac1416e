"""
Records shared by the integrators.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator

FloatArray = npt.NDArray[np.float64]

MAX_DIMENSIONS = 6
MAX_SEED = 2**64


class QuadratureMethod(str, Enum):
    """How a QuadratureResult was obtained."""

    ADAPTIVE_1D = "adaptive-1d"
    NESTED_2D = "nested-2d"
    NESTED_3D = "nested-3d"
    MONTE_CARLO = "monte-carlo"
    FIXED_ORDER = "fixed-order"
    ANALYTIC_LIMIT = "analytic-limit"


class Transform(str, Enum):
    """Change of variables applied to an interval before integration."""

    NONE = "none"
    ALGEBRAIC = "algebraic"
    EXPONENTIAL = "exponential"


class ImportanceKind(str, Enum):
    """Radial proposal densities available to the MC engine."""

    UNIFORM = "uniform"
    GAUSSIAN_RADIAL = "gaussian-radial"
    POWER_LAW_RADIAL = "power-law-radial"


class QuadratureResult(BaseModel):
    """Value, error estimate and cost of one integration."""

    model_config = ConfigDict(frozen=True)

    value: float
    abs_error_estimate: float = Field(ge=0.0)
    evaluations: int = Field(gt=0)
    method: QuadratureMethod

    @property
    def rel_error(self) -> float:
        if self.value == 0.0:
            return 0.0 if self.abs_error_estimate == 0.0 else math.inf
        return self.abs_error_estimate / abs(self.value)

    def scaled(self, factor: float) -> QuadratureResult:
        """Result of integrating ``factor`` times the same integrand."""
        return self.model_copy(
            update={
                "value": factor * self.value,
                "abs_error_estimate": abs(factor) * self.abs_error_estimate,
            }
        )


class Bound(BaseModel):
    """One dimension of an integration domain.

    Infinite ends need a transform: ``algebraic`` maps x = a + u/(1−u) (or
    x = t/(1−t²) on the whole line), ``exponential`` maps x = a − s·ln(1−u)
    (or a logistic map on the whole line) for Gaussian-tailed integrands.
    """

    model_config = ConfigDict(frozen=True)

    lower: float
    upper: float
    transform: Transform = Transform.NONE
    scale: float = Field(default=1.0, gt=0.0)

    @model_validator(mode="after")
    def _check(self) -> Bound:
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ValueError("bounds must not be NaN")
        if not self.lower < self.upper:
            raise ValueError(f"lower ({self.lower}) must be below upper ({self.upper})")
        if math.isinf(self.lower) and math.isfinite(self.upper):
            raise ValueError("only upper-infinite or doubly-infinite intervals are supported")
        if not self.is_finite and self.transform is Transform.NONE:
            raise ValueError("infinite intervals need an algebraic or exponential transform")
        return self

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    def from_unit(self, u: FloatArray) -> tuple[FloatArray, FloatArray]:
        """Map u ∈ (0,1) onto the interval; returns (x, dx/du)."""
        if self.is_finite:
            width = self.upper - self.lower
            return self.lower + width * u, np.full_like(u, width)
        s = self.scale
        if math.isinf(self.lower):
            t = 2.0 * u - 1.0
            if self.transform is Transform.ALGEBRAIC:
                x = s * t / (1.0 - t**2)
                jac = 2.0 * s * (1.0 + t**2) / (1.0 - t**2) ** 2
            else:
                x = s * np.log(u / (1.0 - u))
                jac = s / (u * (1.0 - u))
            return x, jac
        if self.transform is Transform.ALGEBRAIC:
            return self.lower + s * u / (1.0 - u), s / (1.0 - u) ** 2
        return self.lower - s * np.log1p(-u), s / (1.0 - u)


class Domain(BaseModel):
    """Integration domain of one to six dimensions."""

    model_config = ConfigDict(frozen=True)

    bounds: tuple[Bound, ...] = Field(min_length=1, max_length=MAX_DIMENSIONS)

    @classmethod
    def box(cls, *limits: tuple[float, float]) -> Domain:
        """Finite box from (lower, upper) pairs."""
        return cls(bounds=tuple(Bound(lower=lo, upper=hi) for lo, hi in limits))

    @property
    def dimension(self) -> int:
        return len(self.bounds)


class ImportanceSpec(BaseModel):
    """Proposal density replacing the uniform map on selected dimensions.

    ``gaussian-radial`` samples a 2D-Gaussian radius r with density
    r/s² exp(−r²/2s²) on [0, ∞); ``power-law-radial`` samples density ∝ x^{−p}
    on a finite [lower, upper] (p = ``exponent`` < 1 when lower = 0).
    """

    model_config = ConfigDict(frozen=True)

    kind: ImportanceKind = ImportanceKind.UNIFORM
    dims: tuple[int, ...] = ()
    scale: float = Field(default=1.0, gt=0.0)
    exponent: float = 1.0


class McOptions(BaseModel):
    """Options for stratified Monte Carlo integration."""

    model_config = ConfigDict(frozen=True)

    sample_count: int = Field(default=1_000_000, ge=1)
    seed: int = Field(default=0, ge=0, lt=MAX_SEED)
    stratification: tuple[int, ...] = ()
    importance: tuple[ImportanceSpec, ...] = ()

    @model_validator(mode="after")
    def _check(self) -> McOptions:
        if any(n < 1 for n in self.stratification):
            raise ValueError("strata counts must be at least 1")
        return self

    @property
    def strata_count(self) -> int:
        return math.prod(self.stratification) if self.stratification else 1
