"""
Adaptive and fixed-order quadrature.

Adaptive rules wrap QUADPACK (21-point Gauss–Kronrod with extrapolation) from
``scipy.integrate.quad``. Semi-infinite intervals are mapped onto (0, 1)
explicitly so that the substitution is visible in the Domain rather than
hidden inside the library; the Gauss–Kronrod nodes never touch the endpoints,
which handles integrable endpoint singularities.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import structlog
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from ..errors import IntegrandNaNError, NonConvergenceError, UnsupportedDimensionError
from .models import Bound, Domain, FloatArray, QuadratureMethod, QuadratureResult, Transform

logger = structlog.get_logger(__name__).bind(component="quadrature")

DEFAULT_MAX_EVALUATIONS = 1_000_000
MAX_NESTED_DIMENSIONS = 3
KRONROD_POINTS = 21

ScalarFunction = Callable[[float], float]
NestedFunction = Callable[..., float]
VectorFunction = Callable[[FloatArray], FloatArray]

_NESTED_METHODS = {
    1: QuadratureMethod.ADAPTIVE_1D,
    2: QuadratureMethod.NESTED_2D,
    3: QuadratureMethod.NESTED_3D,
}


@dataclass
class _Counter:
    calls: int = 0


def _checked(f: ScalarFunction, counter: _Counter) -> ScalarFunction:
    def wrapped(x: float) -> float:
        counter.calls += 1
        value = float(f(x))
        if not math.isfinite(value):
            raise IntegrandNaNError(x)
        return value

    return wrapped


def _on_unit_interval(f: ScalarFunction, bound: Bound) -> ScalarFunction:
    def mapped(u: float) -> float:
        x, jac = bound.from_unit(np.array([u]))
        xv, jv = float(x[0]), float(jac[0])
        if not (math.isfinite(xv) and math.isfinite(jv)):
            return 0.0
        fx = f(xv)
        return 0.0 if fx == 0.0 else fx * jv

    return mapped


def integrate_1d(
    f: ScalarFunction,
    a: float,
    b: float,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-14,
    *,
    transform: Transform = Transform.ALGEBRAIC,
    scale: float = 1.0,
    oscillation: float | None = None,
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS,
) -> QuadratureResult:
    """Integrate ``f`` over [a, b].

    Infinite ``b`` (and ``a = -inf, b = inf``) are mapped onto (0, 1) with
    ``transform``. With ``oscillation = ω`` the integrand is ``f(x)·cos(ωx)``
    and QUADPACK's Fourier rules (QAWO, or QAWF for b = ∞) are used directly.

    Raises NonConvergenceError when the estimated error exceeds
    max(abs_tol, rel_tol·|value|) after the budget is spent.
    """
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    counter = _Counter()
    g = _checked(f, counter)
    limit = max(50, max_evaluations // (2 * KRONROD_POINTS))

    if oscillation is not None:
        if math.isinf(a):
            raise ValueError("oscillatory rules need a finite lower limit")
        out = integrate.quad(
            g,
            a,
            b,
            weight="cos",
            wvar=oscillation,
            epsabs=abs_tol,
            epsrel=rel_tol,
            limit=limit,
            full_output=1,
        )
    elif math.isfinite(a) and math.isfinite(b):
        out = integrate.quad(g, a, b, epsabs=abs_tol, epsrel=rel_tol, limit=limit, full_output=1)
    else:
        bound = Bound(lower=a, upper=b, transform=transform, scale=scale)
        out = integrate.quad(
            _on_unit_interval(g, bound),
            0.0,
            1.0,
            epsabs=abs_tol,
            epsrel=rel_tol,
            limit=limit,
            full_output=1,
        )

    value, abs_error = float(out[0]), float(out[1])
    if len(out) > 3:
        target = max(abs_tol, rel_tol * abs(value))
        if abs_error > target or counter.calls > max_evaluations or not math.isfinite(value):
            raise NonConvergenceError(str(out[3]).strip(), value, abs_error, counter.calls)
        logger.debug("Quadrature flagged but within tolerance", message=str(out[3]).strip())
    return QuadratureResult(
        value=value,
        abs_error_estimate=abs(abs_error),
        evaluations=max(counter.calls, 1),
        method=QuadratureMethod.ADAPTIVE_1D,
    )


def integrate_nd(
    f: NestedFunction,
    domain: Domain,
    rel_tol: float = 1e-6,
    abs_tol: float = 1e-14,
    *,
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS,
) -> QuadratureResult:
    """Nested adaptive quadrature of ``f(x1, ..., xd)`` for d ≤ 3.

    The first bound is the outermost integral. Inner integrals run at a ten
    times tighter relative tolerance; the reported error adds the outer
    estimate and the worst inner relative error times the value.
    """
    d = domain.dimension
    if d > MAX_NESTED_DIMENSIONS:
        raise UnsupportedDimensionError(
            f"nested quadrature supports at most {MAX_NESTED_DIMENSIONS} dimensions, "
            f"got {d}; use mc_integrate"
        )
    counter = _Counter()
    worst_inner = 0.0

    def integrand(x: float, *prefix: float) -> float:
        counter.calls += 1
        return float(f(*prefix, x))

    def nested(level: int, prefix: tuple[float, ...], tol: float) -> QuadratureResult:
        bound = domain.bounds[level]

        def inner(x: float) -> float:
            nonlocal worst_inner
            if level == d - 1:
                return integrand(x, *prefix)
            res = nested(level + 1, (*prefix, x), tol * 0.1)
            if res.value:
                worst_inner = max(worst_inner, res.rel_error)
            return res.value

        return integrate_1d(
            inner,
            bound.lower,
            bound.upper,
            tol,
            abs_tol,
            transform=bound.transform,
            scale=bound.scale,
            max_evaluations=max_evaluations,
        )

    outer = nested(0, (), rel_tol)
    return QuadratureResult(
        value=outer.value,
        abs_error_estimate=outer.abs_error_estimate + worst_inner * abs(outer.value),
        evaluations=max(counter.calls, 1),
        method=_NESTED_METHODS[d],
    )


def _product_rule(f: VectorFunction, domain: Domain, nodes: tuple[int, ...]) -> tuple[float, int]:
    axes = []
    weights = []
    for bound, n in zip(domain.bounds, nodes, strict=True):
        t, w = leggauss(n)
        u = 0.5 * (t + 1.0)
        x, jac = bound.from_unit(u)
        axes.append(x)
        weights.append(0.5 * w * jac)
    grids = np.meshgrid(*axes, indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=-1)
    weight = np.ones(points.shape[0])
    for w_grid in np.meshgrid(*weights, indexing="ij"):
        weight = weight * w_grid.ravel()
    values = np.asarray(f(points), dtype=np.float64)
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise IntegrandNaNError(tuple(points[bad]))
    return float(np.dot(weight, values)), points.shape[0]


def gauss_legendre_product(
    f: VectorFunction, domain: Domain, nodes: tuple[int, ...]
) -> QuadratureResult:
    """Tensor-product Gauss–Legendre rule for a vectorized integrand.

    ``f`` receives an (n, d) array of points. The error estimate is the
    difference from the same rule with every node count reduced by a third.
    """
    if len(nodes) != domain.dimension:
        raise ValueError("one node count per dimension is required")
    high, n_high = _product_rule(f, domain, nodes)
    low_nodes = tuple(max(1, (2 * n) // 3) for n in nodes)
    low, n_low = _product_rule(f, domain, low_nodes)
    return QuadratureResult(
        value=high,
        abs_error_estimate=abs(high - low),
        evaluations=n_high + n_low,
        method=QuadratureMethod.FIXED_ORDER,
    )
