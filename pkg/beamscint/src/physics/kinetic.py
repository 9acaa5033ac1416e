"""
Discrete collision and diffusion operators on a transverse-wavevector grid.

The collision integral −ν̂{f} = −(2πω0²/c)∫d²k′ ψ(k′)[f(q) − f(q + k′)] is a
convolution, so it is applied as a multiplier in the Fourier domain of the
grid. Every shift q → q + k′ is then the exact band-limited shift of the
sampled PDF with periodic wrap, and the multiplier vanishes at zero
frequency, which conserves the grid sum to rounding.

The k′ integral runs over the annulus [2π/L0_eff, 4π·(2π/l0)] with
Gauss–Legendre nodes in ln k′; the azimuth is done in closed form through J0.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import numpy.typing as npt
import structlog
from numpy.polynomial.legendre import leggauss
from pydantic import BaseModel, ConfigDict, Field
from scipy import special
from scipy.constants import c as SPEED_OF_LIGHT

from ..errors import BoundaryLeakageError, ParameterError
from .beam import BeamBoundary
from .spectrum import SpectrumParams, psi

logger = structlog.get_logger(__name__).bind(component="kinetic-operator")

FloatArray = npt.NDArray[np.float64]

DEFAULT_NODES = 256
DEFAULT_RADIAL_NODES = 64
OUTER_SCALE_CAP = 1e4
ANNULUS_UPPER = 4.0 * math.pi
LEAKAGE_THRESHOLD = 1e-12
WIDTHS_COVERED = 8.0
KERNEL_REACH = 6.0


class GridSpec(BaseModel):
    """Square grid over q⊥ ∈ [−extent, extent)² with periodic spacing."""

    model_config = ConfigDict(frozen=True)

    extent: float = Field(gt=0.0, description="half-width of the grid, 1/m")
    nodes: int = Field(default=DEFAULT_NODES, ge=8)
    radial_nodes: int = Field(default=DEFAULT_RADIAL_NODES, ge=4)

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / self.nodes

    @property
    def axis(self) -> FloatArray:
        return -self.extent + self.spacing * np.arange(self.nodes, dtype=np.float64)

    def mesh(self) -> tuple[FloatArray, FloatArray]:
        return np.meshgrid(self.axis, self.axis, indexing="ij")


@dataclass(frozen=True)
class PdfGrid:
    """Photon density sampled on a q⊥ grid at a fixed transverse position."""

    values: FloatArray
    spec: GridSpec

    def __post_init__(self) -> None:
        if self.values.shape != (self.spec.nodes, self.spec.nodes):
            raise ParameterError(
                "values", f"expected shape {(self.spec.nodes,) * 2}, got {self.values.shape}"
            )

    @property
    def total_mass(self) -> float:
        return float(self.values.sum() * self.spec.spacing**2)

    def to_csv(self, path: Path) -> None:
        """Write (x-index, y-index, value) rows."""
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["x_index", "y_index", "value"])
            for (i, j), value in np.ndenumerate(self.values):
                writer.writerow([i, j, format(float(value), ".17g")])


def _default_extent(width: float, s: SpectrumParams) -> float:
    return WIDTHS_COVERED * width + KERNEL_REACH * s.inner_wavenumber


def gaussian_grid(width: float, s: SpectrumParams, nodes: int = DEFAULT_NODES) -> PdfGrid:
    """Isotropic Gaussian exp(−q²/2w²) on a grid wide enough for the kernel."""
    if width <= 0:
        raise ParameterError("width", "must be strictly positive")
    spec = GridSpec(extent=_default_extent(width, s), nodes=nodes)
    qx, qy = spec.mesh()
    return PdfGrid(values=np.exp(-(qx * qx + qy * qy) / (2.0 * width**2)), spec=spec)


def boundary_grid(beam: BeamBoundary, s: SpectrumParams, nodes: int | None = None) -> PdfGrid:
    """Boundary PDF at r⊥ = 0 sampled on a grid around its q⊥ Gaussian.

    Without ``nodes`` the grid is refined in powers of two until the spacing
    resolves a quarter of the Gaussian width.
    """
    width = 1.0 / beam.r1
    extent = _default_extent(width, s)
    if nodes is None:
        nodes = DEFAULT_NODES
        while 2.0 * extent / nodes > width / 4.0:
            nodes *= 2
    spec = GridSpec(extent=extent, nodes=nodes)
    qx, qy = spec.mesh()
    return PdfGrid(values=np.exp(-beam.a * (qx * qx + qy * qy)), spec=spec)


def _annulus_nodes(s: SpectrumParams, radial_nodes: int) -> tuple[FloatArray, FloatArray]:
    """Nodes k and weights for ∫ g(k) d(ln k) across the collision annulus."""
    outer = OUTER_SCALE_CAP * s.l0
    if s.inv_L0_sq > 0:
        outer = min(outer, 1.0 / math.sqrt(s.inv_L0_sq))
    lo = math.log(2.0 * math.pi / outer)
    hi = math.log(ANNULUS_UPPER * s.inner_wavenumber)
    t, w = leggauss(radial_nodes)
    log_k = 0.5 * (hi - lo) * t + 0.5 * (hi + lo)
    return np.exp(log_k), 0.5 * (hi - lo) * w


def _rate_prefactor(omega0: float) -> float:
    if omega0 <= 0:
        raise ParameterError("omega0", "must be strictly positive")
    return 2.0 * math.pi * omega0**2 / SPEED_OF_LIGHT


def collision_multiplier(
    u: npt.ArrayLike, s: SpectrumParams, omega0: float, radial_nodes: int = DEFAULT_RADIAL_NODES
) -> FloatArray:
    """Fourier symbol m(|u|) of −ν̂: 2πC Σ w k² ψ(k) (J0(|u| k) − 1)."""
    u_abs = np.abs(np.asarray(u, dtype=np.float64))
    k, w = _annulus_nodes(s, radial_nodes)
    weight = 2.0 * math.pi * _rate_prefactor(omega0) * w * k * k * psi(k, s)
    out = np.zeros_like(u_abs)
    for k_i, w_i in zip(k, weight, strict=True):
        out += w_i * (special.j0(u_abs * k_i) - 1.0)
    return out


def diffusion_coefficient(
    s: SpectrumParams, omega0: float, radial_nodes: int = DEFAULT_RADIAL_NODES
) -> float:
    """D = (π²ω0²/c) ∫ ψ(k) k³ dk over the collision annulus."""
    k, w = _annulus_nodes(s, radial_nodes)
    return float(0.5 * math.pi * _rate_prefactor(omega0) * np.sum(w * psi(k, s) * k**4))


def _check_boundary(g: PdfGrid) -> None:
    v = np.abs(g.values)
    peak = float(v.max())
    if peak == 0.0:
        return
    edge = max(float(v[0].max()), float(v[-1].max()), float(v[:, 0].max()), float(v[:, -1].max()))
    if edge > LEAKAGE_THRESHOLD * peak:
        raise BoundaryLeakageError(
            f"PDF reaches {edge / peak:.3g} of its maximum on the grid edge; widen the grid"
        )


def apply_collision(
    g: PdfGrid, s: SpectrumParams, omega0: float, *, check_boundary: bool = True
) -> PdfGrid:
    """Collision term −ν̂{f} sampled on the grid of ``g``."""
    if check_boundary:
        _check_boundary(g)
    n, h = g.spec.nodes, g.spec.spacing
    ux = 2.0 * math.pi * np.fft.fftfreq(n, d=h)
    uy = 2.0 * math.pi * np.fft.rfftfreq(n, d=h)
    u = np.hypot(ux[:, None], uy[None, :])
    m = collision_multiplier(u, s, omega0, g.spec.radial_nodes)
    out = np.fft.irfft2(m * np.fft.rfft2(g.values), s=g.values.shape)
    logger.debug("Applied collision operator", nodes=n, spacing=h)
    return PdfGrid(values=out, spec=g.spec)


def _second_difference(f: FloatArray, axis: int, h: float) -> FloatArray:
    # fourth-order central stencil
    return (
        -np.roll(f, 2, axis)
        + 16.0 * np.roll(f, 1, axis)
        - 30.0 * f
        + 16.0 * np.roll(f, -1, axis)
        - np.roll(f, -2, axis)
    ) / (12.0 * h * h)


def apply_diffusion(
    g: PdfGrid, s: SpectrumParams, omega0: float, *, check_boundary: bool = True
) -> PdfGrid:
    """Diffusion limit D∇²f of the collision term, Laplacian by central differences.

    The two outermost rows and columns wrap around the grid and are only
    meaningful when the PDF vanishes there.
    """
    if check_boundary:
        _check_boundary(g)
    h = g.spec.spacing
    laplacian = _second_difference(g.values, 0, h) + _second_difference(g.values, 1, h)
    D = diffusion_coefficient(s, omega0, g.spec.radial_nodes)
    return PdfGrid(values=D * laplacian, spec=g.spec)


def relative_l2_distance(a: PdfGrid, b: PdfGrid) -> float:
    """‖a − b‖₂ / ‖b‖₂ over the whole grid."""
    if a.spec != b.spec:
        raise ParameterError("grid", "grids must share a GridSpec")
    norm = float(np.linalg.norm(b.values))
    if norm == 0.0:
        return 0.0 if not np.any(a.values) else math.inf
    return float(np.linalg.norm(a.values - b.values)) / norm
