"""
Stratified Monte Carlo integration with optional radial importance sampling.

Each stratum draws from its own numpy substream seeded by
``SeedSequence([seed, stratum_index])``, and stratum estimates are reduced
in index order, so the result does not depend on how many workers ran.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import structlog

from ..errors import IntegrandNaNError
from .models import (
    Bound,
    Domain,
    FloatArray,
    ImportanceKind,
    ImportanceSpec,
    McOptions,
    QuadratureMethod,
    QuadratureResult,
)

logger = structlog.get_logger(__name__).bind(component="monte-carlo")

VectorFunction = Callable[[FloatArray], FloatArray]

# u stays strictly inside (0, 1) so that the interval maps stay finite
_U_MIN = 2.0**-60
_U_MAX = 1.0 - 2.0**-53


def get_rng(seed: int, stratum: int = 0) -> np.random.Generator:
    """Substream for one stratum of a seeded run."""
    return np.random.default_rng(np.random.SeedSequence([seed, stratum]))


def _map_importance(u: FloatArray, bound: Bound, spec: ImportanceSpec) -> tuple[FloatArray, FloatArray]:
    if spec.kind is ImportanceKind.GAUSSIAN_RADIAL:
        if bound.lower != 0.0 or math.isfinite(bound.upper):
            raise ValueError("gaussian-radial importance needs the interval [0, inf)")
        s = spec.scale
        x = s * np.sqrt(-2.0 * np.log1p(-u))
        pdf = x / s**2 * np.exp(-0.5 * (x / s) ** 2)
        return x, 1.0 / pdf

    if spec.kind is ImportanceKind.POWER_LAW_RADIAL:
        if not bound.is_finite:
            raise ValueError("power-law-radial importance needs a finite interval")
        lo, hi, p = bound.lower, bound.upper, spec.exponent
        if p == 1.0:
            if lo <= 0:
                raise ValueError("a log-uniform proposal needs a positive lower bound")
            span = math.log(hi / lo)
            x = lo * np.exp(span * u)
            return x, x * span
        m = 1.0 - p
        if lo == 0.0 and m <= 0:
            raise ValueError("power-law exponent must be below 1 when the lower bound is 0")
        norm = hi**m - lo**m
        x = (lo**m + u * norm) ** (1.0 / m)
        return x, norm * x**p / m

    return bound.from_unit(u)


def _map_points(
    u: FloatArray, domain: Domain, importance: dict[int, ImportanceSpec]
) -> tuple[FloatArray, FloatArray]:
    x = np.empty_like(u)
    jac = np.ones(u.shape[0])
    for dim, bound in enumerate(domain.bounds):
        spec = importance.get(dim)
        if spec is None:
            x[:, dim], j = bound.from_unit(u[:, dim])
        else:
            x[:, dim], j = _map_importance(u[:, dim], bound, spec)
        jac *= j
    return x, jac


def mc_integrate(
    f: VectorFunction,
    domain: Domain,
    opts: McOptions,
    *,
    workers: int = 1,
) -> QuadratureResult:
    """Stratified Monte Carlo estimate of ∫ f over ``domain``.

    ``f`` receives an (n, d) array of points in domain coordinates and returns
    n values. Strata divide the unit hypercube per ``opts.stratification``
    (missing dimensions are not stratified). The error estimate is the
    standard error of the stratified mean.
    """
    d = domain.dimension
    if len(opts.stratification) > d:
        raise ValueError("more strata dimensions than domain dimensions")
    counts = np.array(opts.stratification + (1,) * (d - len(opts.stratification)))
    n_strata = int(np.prod(counts))
    per_stratum = max(2, opts.sample_count // n_strata)

    importance: dict[int, ImportanceSpec] = {}
    for spec in opts.importance:
        if spec.kind is ImportanceKind.UNIFORM:
            continue
        for dim in spec.dims:
            if not 0 <= dim < d:
                raise ValueError(f"importance dimension {dim} outside the domain")
            importance[dim] = spec

    def run_stratum(index: int) -> tuple[float, float]:
        rng = get_rng(opts.seed, index)
        cell = np.array(np.unravel_index(index, tuple(counts)), dtype=np.float64)
        u = (cell + rng.random((per_stratum, d))) / counts
        np.clip(u, _U_MIN, _U_MAX, out=u)
        x, jac = _map_points(u, domain, importance)
        values = np.asarray(f(x), dtype=np.float64) * jac
        finite = np.isfinite(values)
        if not np.all(finite):
            bad = int(np.flatnonzero(~finite)[0])
            raise IntegrandNaNError(tuple(float(v) for v in x[bad]))
        return float(values.mean()), float(values.var(ddof=1))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(run_stratum, range(n_strata)))
    else:
        stats = [run_stratum(index) for index in range(n_strata)]

    value = 0.0
    variance = 0.0
    for mean, var in stats:
        value += mean / n_strata
        variance += var / (n_strata**2 * per_stratum)

    logger.debug(
        "Monte Carlo integral",
        value=value,
        std_error=math.sqrt(variance),
        strata=n_strata,
        samples=n_strata * per_stratum,
    )
    return QuadratureResult(
        value=value,
        abs_error_estimate=math.sqrt(variance),
        evaluations=n_strata * per_stratum,
        method=QuadratureMethod.MONTE_CARLO,
    )
