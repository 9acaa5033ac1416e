"""
Result records produced by the scintillation pipeline.
"""

from __future__ import annotations

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..physics.cross_term import CrossTermResult
from ..physics.first_order import FirstOrderResult
from ..physics.intensity import IntensityCorrection
from ..physics.params import RegimeReport


class SweepAxis(str, Enum):
    """Parameter varied along a sweep."""

    Z = "z"
    CN2 = "cn2"
    SIGMA1_SQ = "sigma1_sq"


class ScintResult(BaseModel):
    """On-axis scintillation index in its three variants plus every ingredient.

    ``denominator_share`` is the fraction of the enhancement over the
    Rytov-like value that the (1 + i1)⁻² factor explains on its own; it is
    None when there is no enhancement to attribute.
    """

    model_config = ConfigDict(frozen=True)

    sigma2_full: float
    sigma2_no_df2: float
    sigma2_rytov_like: float
    big_L: float
    i1_ratio: float
    x2_ratio: float
    sigma1_sq: float
    error_estimate: float = Field(ge=0.0)
    denominator_share: float | None = None
    x2_precision_ok: bool = True
    flagged: bool = False
    evaluations: int = Field(default=0, ge=0)
    regime: RegimeReport
    first_order: FirstOrderResult
    intensity: IntensityCorrection
    cross: CrossTermResult

    @model_validator(mode="after")
    def _check(self) -> ScintResult:
        values = (self.sigma2_full, self.sigma2_no_df2, self.sigma2_rytov_like)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("scintillation indices must be finite")
        if self.sigma2_full < 0.0:
            raise ValueError(f"sigma2_full must be non-negative, got {self.sigma2_full}")
        return self


class SweepRow(BaseModel):
    """One CSV row: the swept value and the flattened ScintResult.

    Numeric fields are NaN and ``error`` holds the message when the point
    failed.
    """

    model_config = ConfigDict(frozen=True)

    axis: SweepAxis
    value: float
    r0: float
    cn2: float
    z: float
    sigma2_full: float = math.nan
    sigma2_no_df2: float = math.nan
    sigma2_rytov_like: float = math.nan
    big_L: float = math.nan
    i1_ratio: float = math.nan
    x2_ratio: float = math.nan
    sigma1_sq: float = math.nan
    error_estimate: float = math.nan
    denominator_share: float | None = None
    x2_precision_ok: bool | None = None
    flagged: bool | None = None
    within_moderate: bool | None = None
    within_rytov: bool | None = None
    time_hierarchy_ok: bool | None = None
    seed: int
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @classmethod
    def columns(cls) -> list[str]:
        return list(cls.model_fields)
