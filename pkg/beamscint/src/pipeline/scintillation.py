"""
Assembly of the on-axis scintillation index and parameter sweeps.

    σ² = (σ1²·L + x2) / (1 + i1)²

Each ingredient is a pipeline stage: first-order (L), intensity (i1) and
cross-term (x2). Stages run inside logfire spans, go through the result
cache when one is given, and have their failures wrapped in
PipelineStageError naming the stage.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Any, TypeVar

import logfire
import structlog
from pydantic import BaseModel, ValidationError

from ..config import settings
from ..errors import InternalConsistencyError, ParameterError, PipelineStageError, ScintError
from ..io.cache import ResultCache
from ..numerics.models import McOptions
from ..physics.cross_term import CrossTermResult, cross_term_ratio
from ..physics.first_order import FirstOrderResult, big_L, check_rel_tol
from ..physics.intensity import IntensityCorrection, intensity_correction_ratio
from ..physics.params import (
    PhysicalParams,
    cn2_for_sigma1_sq,
    derive_params,
    validate_regime,
)
from .models import ScintResult, SweepAxis, SweepRow

logger = structlog.get_logger(__name__).bind(component="scint-pipeline")

M = TypeVar("M", bound=BaseModel)

SEED_MASK = (1 << 64) - 1
CROSS_TERM_STRATA = (4, 4, 2, 2)
SERIES_FIELDS = ("r0", "cn2")


def splitmix64(x: int) -> int:
    """One step of the splitmix64 output function."""
    z = (x + 0x9E3779B97F4A7C15) & SEED_MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & SEED_MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & SEED_MASK
    return z ^ (z >> 31)


def row_seed(seed: int, index: int) -> int:
    return (seed ^ splitmix64(index)) & SEED_MASK


def _stage(
    name: str,
    cache: ResultCache | None,
    key: dict[str, Any],
    model_type: type[M],
    compute: Callable[[], M],
    count: Callable[[M], int],
) -> tuple[M, int]:
    with logfire.span("stage {stage}", stage=name):
        try:
            if cache is None:
                value = compute()
                return value, count(value)
            cached = cache.get_or_compute(key, model_type, compute, count)
            return cached.value, cached.evaluations
        except (ScintError, ValueError, ArithmeticError) as e:
            logger.warning("Pipeline stage failed", stage=name, error=str(e))
            raise PipelineStageError(name, e) from e


def _combined_error(numerator: float, d_numerator: float, denominator: float, d_denominator: float) -> float:
    return math.hypot(
        d_numerator / denominator**2,
        2.0 * numerator * d_denominator / denominator**3,
    )


@logfire.instrument("scintillation_index", extract_args=True)
def scintillation_index(
    p: PhysicalParams,
    tol: float | None = None,
    seed: int | None = None,
    mc_samples: int | None = None,
    cache: ResultCache | None = None,
    workers: int = 1,
) -> ScintResult:
    """σ² at the detector centre with every sub-result retained.

    ``tol`` is the relative tolerance of the deterministic stages, ``seed``
    and ``mc_samples`` drive the Monte Carlo cross term; unset values come
    from settings.
    """
    tol = settings.rel_tol if tol is None else tol
    seed = settings.seed if seed is None else seed
    mc_samples = settings.mc_samples if mc_samples is None else mc_samples
    check_rel_tol(tol)

    d = derive_params(p)
    regime = validate_regime(d, p)
    params = p.model_dump()

    first, first_evals = _stage(
        "first-order",
        cache,
        ResultCache.make_key("first-order", params=params, rel_tol=tol),
        FirstOrderResult,
        lambda: big_L(d, p, tol),
        lambda r: r.quad.evaluations,
    )
    intensity, intensity_evals = _stage(
        "intensity",
        cache,
        ResultCache.make_key("intensity", params=params, rel_tol=tol),
        IntensityCorrection,
        lambda: intensity_correction_ratio(d, p, tol),
        lambda r: r.quad.evaluations,
    )
    opts = McOptions(sample_count=mc_samples, seed=seed, stratification=CROSS_TERM_STRATA)
    cross, cross_evals = _stage(
        "cross-term",
        cache,
        ResultCache.make_key(
            "cross-term",
            params=params,
            seed=seed,
            mc_samples=mc_samples,
            stratification=list(CROSS_TERM_STRATA),
        ),
        CrossTermResult,
        lambda: cross_term_ratio(d, p, opts, workers=workers),
        lambda r: r.quad.evaluations,
    )

    denominator = 1.0 + intensity.i1_ratio
    if denominator <= 0.0:
        raise PipelineStageError(
            "assembly",
            ParameterError("i1_ratio", f"1 + i1 = {denominator:.4g} leaves no mean intensity"),
        )
    rytov_like = first.sigma2_first
    numerator = rytov_like + cross.x2_ratio
    if numerator < 0.0:
        raise PipelineStageError(
            "assembly",
            InternalConsistencyError(
                f"σ1²·L + x2 = {numerator:.4g} is negative (σ1²·L = {rytov_like:.4g}, x2 = {cross.x2_ratio:.4g})"
            ),
        )
    d_numerator = math.hypot(d.sigma1_sq * first.quad.abs_error_estimate, cross.quad.abs_error_estimate)
    error = _combined_error(numerator, d_numerator, denominator, intensity.quad.abs_error_estimate)

    sigma2_no_df2 = rytov_like / denominator**2
    sigma2_full = numerator / denominator**2
    enhancement = sigma2_full - rytov_like
    share = (sigma2_no_df2 - rytov_like) / enhancement if enhancement != 0.0 else None

    result = ScintResult(
        sigma2_full=sigma2_full,
        sigma2_no_df2=sigma2_no_df2,
        sigma2_rytov_like=rytov_like,
        big_L=first.big_L,
        i1_ratio=intensity.i1_ratio,
        x2_ratio=cross.x2_ratio,
        sigma1_sq=d.sigma1_sq,
        error_estimate=error,
        denominator_share=share,
        x2_precision_ok=cross.precision_ok,
        flagged=not regime.within_moderate,
        evaluations=first_evals + intensity_evals + cross_evals,
        regime=regime,
        first_order=first,
        intensity=intensity,
        cross=cross,
    )
    logger.info(
        "Scintillation index",
        sigma1_sq=d.sigma1_sq,
        sigma2_full=sigma2_full,
        sigma2_rytov_like=rytov_like,
        i1_ratio=intensity.i1_ratio,
        x2_ratio=cross.x2_ratio,
        evaluations=result.evaluations,
    )
    return result


def _point(p: PhysicalParams, axis: SweepAxis, value: float) -> PhysicalParams:
    fields = p.model_dump()
    if axis is SweepAxis.SIGMA1_SQ:
        fields["cn2"] = cn2_for_sigma1_sq(value, p.q0, p.z)
    else:
        fields[axis.value] = value
    return PhysicalParams.model_validate(fields)


def _row(
    p: PhysicalParams,
    axis: SweepAxis,
    value: float,
    seed: int,
    tol: float | None,
    mc_samples: int | None,
    cache: ResultCache | None,
) -> SweepRow:
    try:
        point = _point(p, axis, value)
    except ValidationError as e:
        logfire.exception("Invalid sweep point")
        return SweepRow(axis=axis, value=value, r0=p.r0, cn2=p.cn2, z=p.z, seed=seed, error=str(e))

    base: dict[str, Any] = {
        "axis": axis,
        "value": value,
        "r0": point.r0,
        "cn2": point.cn2,
        "z": point.z,
        "seed": seed,
    }
    try:
        r = scintillation_index(point, tol, seed, mc_samples, cache)
    except ScintError as e:
        logfire.exception("Sweep point failed")
        logger.warning("Sweep point failed", axis=axis.value, value=value, error=str(e))
        return SweepRow(**base, error=str(e))

    return SweepRow(
        **base,
        sigma2_full=r.sigma2_full,
        sigma2_no_df2=r.sigma2_no_df2,
        sigma2_rytov_like=r.sigma2_rytov_like,
        big_L=r.big_L,
        i1_ratio=r.i1_ratio,
        x2_ratio=r.x2_ratio,
        sigma1_sq=r.sigma1_sq,
        error_estimate=r.error_estimate,
        denominator_share=r.denominator_share,
        x2_precision_ok=r.x2_precision_ok,
        flagged=r.flagged,
        within_moderate=r.regime.within_moderate,
        within_rytov=r.regime.within_rytov,
        time_hierarchy_ok=r.regime.time_hierarchy_ok,
    )


@logfire.instrument("sweep", extract_args=True)
def sweep(
    p: PhysicalParams,
    axis: SweepAxis,
    grid: Sequence[float],
    tol: float | None = None,
    seed: int | None = None,
    mc_samples: int | None = None,
    cache: ResultCache | None = None,
    workers: int = 1,
) -> list[SweepRow]:
    """One row per grid point, in grid order.

    Row i uses the seed ``seed XOR splitmix64(i)``, so results do not depend
    on ``workers``. A failing point becomes a row with ``error`` set.
    """
    values = [float(v) for v in grid]
    if not values:
        raise ParameterError("grid", "at least one point is required")
    if any(b <= a for a, b in zip(values, values[1:], strict=False)):
        raise ParameterError("grid", "must be strictly increasing")
    base_seed = settings.seed if seed is None else seed
    seeds = [row_seed(base_seed, i) for i in range(len(values))]

    def run(i: int) -> SweepRow:
        return _row(p, axis, values[i], seeds[i], tol, mc_samples, cache)

    with logfire.span("sweep {axis}", axis=axis.value, points=len(values)):
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(run, range(len(values))))
        else:
            rows = [run(i) for i in range(len(values))]

    failures = sum(not row.ok for row in rows)
    if failures:
        logger.warning("Sweep finished with failures", failures=failures, points=len(rows))
    return rows


def series(
    p: PhysicalParams,
    axis: SweepAxis,
    grid: Sequence[float],
    values: Sequence[float],
    tol: float | None = None,
    seed: int | None = None,
    mc_samples: int | None = None,
    cache: ResultCache | None = None,
    workers: int = 1,
    *,
    field: str = "r0",
) -> list[SweepRow]:
    """The same sweep repeated for each entry of ``values``.

    ``field`` names the channel parameter the entries replace: the aperture
    radius ``r0`` or the turbulence strength ``cn2``. A Cn² family only makes
    sense on the distance axis.
    """
    if field not in SERIES_FIELDS:
        raise ParameterError("field", f"must be one of {', '.join(SERIES_FIELDS)}")
    if field == "cn2" and axis is not SweepAxis.Z:
        raise ParameterError("cn2_series", "a Cn² family needs the z axis")
    rows: list[SweepRow] = []
    for value in values:
        try:
            channel = PhysicalParams.model_validate({**p.model_dump(), field: value})
        except ValidationError as e:
            raise ParameterError(f"{field}_series", str(e)) from e
        rows.extend(sweep(channel, axis, grid, tol, seed, mc_samples, cache, workers))
    return rows
