"""
Aperture-plane photon distribution and the vacuum-propagated beam.

Units are normalized so that the boundary PDF peaks at 1 and the on-axis
intensity at the aperture is 1. All prefactors that would multiply both the
numerator and the denominator of the scintillation index are dropped.

Photons stream freely along straight lines: a photon with transverse
wavevector q at z = 0 and position x reaches x + q·z/q0 at distance z, so the
free-streamed PDF is f0(r, q, z) = F(r − q·s, q) with s = z/q0.
"""

from __future__ import annotations

import math

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import ParameterError
from .params import DerivedParams, PhysicalParams

FloatArray = npt.NDArray[np.float64]


class BeamBoundary(BaseModel):
    """Gaussian aperture of radius r0 with a partially coherent q-width 1/r1."""

    model_config = ConfigDict(frozen=True)

    r0: float = Field(gt=0.0)
    r1: float = Field(gt=0.0)
    q0: float = Field(gt=0.0)

    @model_validator(mode="after")
    def _check_radii(self) -> BeamBoundary:
        if self.r1 > self.r0:
            raise ValueError("r1 must not exceed r0")
        return self

    @classmethod
    def from_params(cls, p: PhysicalParams, d: DerivedParams) -> BeamBoundary:
        return cls(r0=p.r0, r1=d.r1, q0=p.q0)

    @property
    def a(self) -> float:
        """Coefficient of q⊥² in the boundary exponent."""
        return self.r1**2 / 2.0

    @property
    def b(self) -> float:
        """Coefficient of r⊥² in the boundary exponent."""
        return 2.0 / self.r0**2

    def spread(self, z: float) -> float:
        """A(z) = a + b (z/q0)², the q-width of the free-streamed PDF."""
        s = z / self.q0
        return self.a + self.b * s * s

    def gamma(self, z: float) -> float:
        """ab/A(z), the Gaussian coefficient of the vacuum intensity at z."""
        return self.a * self.b / self.spread(z)


def _norm_sq(v: npt.ArrayLike) -> FloatArray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.shape == () or arr.shape[-1] != 2:
        raise ParameterError("vector", "transverse vectors need a trailing axis of length 2")
    return np.sum(arr * arr, axis=-1)


def _as_output(value: FloatArray) -> float | FloatArray:
    return float(value) if np.ndim(value) == 0 else value


def boundary_pdf(
    q_perp: npt.ArrayLike, r_perp: npt.ArrayLike, b: BeamBoundary
) -> float | FloatArray:
    """F(q⊥, r⊥) = exp(−q⊥² r1²/2 − 2 r⊥²/r0²).

    The q⊥ width uses r1 and the r⊥ width uses r0: a phase diffuser broadens
    the angular spectrum without touching the aperture profile.
    """
    return _as_output(np.exp(-b.a * _norm_sq(q_perp) - b.b * _norm_sq(r_perp)))


def vacuum_intensity(r_perp: npt.ArrayLike, z: float, b: BeamBoundary) -> float | FloatArray:
    """Closed-form free-space intensity (a/A)·exp(−ab r⊥²/A).

    On axis this is ρ0²ρ1²/(4 + ρ0²ρ1²).
    """
    if z < 0:
        raise ParameterError("z", "distance must be non-negative")
    A = b.spread(z)
    return _as_output(b.a / A * np.exp(-b.gamma(z) * _norm_sq(r_perp)))


def beam_radius_sq(z: float, b: BeamBoundary) -> float:
    """Squared 1/e² intensity radius, 2A/(ab); equals r0² at the aperture."""
    return 2.0 * b.spread(z) / (b.a * b.b)


def lattice_intensity(
    r_perp: npt.ArrayLike,
    z: float,
    b: BeamBoundary,
    nodes: int = 201,
    extent: float | None = None,
) -> float:
    """Brute-force q⊥-lattice sum of the free-streamed boundary PDF.

    Sums F(r⊥ − q⊥ z/q0, q⊥) over a square lattice of ``nodes``² points
    covering ±``extent`` (default eight widths of the streamed PDF) and
    normalizes by the aperture value π/a.
    """
    if z < 0:
        raise ParameterError("z", "distance must be non-negative")
    if nodes < 3:
        raise ParameterError("nodes", "at least 3 lattice nodes are needed")
    r = np.asarray(r_perp, dtype=np.float64)
    if r.shape != (2,):
        raise ParameterError("r_perp", "a single transverse point is expected")
    half = extent if extent is not None else 8.0 / math.sqrt(b.spread(z))
    axis = np.linspace(-half, half, nodes)
    step = axis[1] - axis[0]
    qx, qy = np.meshgrid(axis, axis, indexing="ij")
    s = z / b.q0
    x = r[0] - qx * s
    y = r[1] - qy * s
    total = np.sum(np.exp(-b.a * (qx * qx + qy * qy) - b.b * (x * x + y * y)))
    return float(total * step * step / (math.pi / b.a))
