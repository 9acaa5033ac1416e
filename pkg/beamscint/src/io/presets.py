"""
Named parameter sets fig1 to fig4: the reference channels for σ² against
Rytov variance, distance and aperture radius.

Turbulence strengths and sweep grids stay inside the moderate-turbulence
range.
"""

from __future__ import annotations

import math
from typing import Any

from ..errors import ConfigError

# 100 m .. 1100 m in 100 m steps
_Z_GRID = tuple(float(z) for z in range(100, 1101, 100))

_SIGMA1_SQ_GRID = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.85)

_INNER_SCALE_FIG2 = 2.0 * math.pi * 1e-3

PRESETS: dict[str, dict[str, Any]] = {
    "fig1": {
        "cn2": 1e-15,
        "l0": 6.3e-3,
        "q0": 1.29e7,
        "r0": 0.01,
        "z": 1200.0,
        "axis": "sigma1_sq",
        "grid": _SIGMA1_SQ_GRID,
    },
    "fig2": {
        "cn2": 1e-14,
        "l0": _INNER_SCALE_FIG2,
        "q0": 1e7,
        "r0": 0.01,
        "z": 1000.0,
        "axis": "z",
        "grid": _Z_GRID,
        "cn2_series": (2.5e-15, 5e-15, 1e-14),
    },
    "fig3": {
        "cn2": 1e-14,
        "l0": _INNER_SCALE_FIG2,
        "q0": 1e7,
        "r0": 0.01,
        "z": 1000.0,
        "axis": "z",
        "grid": _Z_GRID,
        "r0_series": (0.01, 0.03),
    },
    "fig4": {
        "cn2": 1e-14,
        "l0": _INNER_SCALE_FIG2,
        "q0": 1e7,
        "r0": 0.01,
        "z": 1000.0,
        "axis": "z",
        "grid": _Z_GRID,
        "cn2_series": (5e-15, 1e-14),
    },
}

DESCRIPTIONS = {
    "fig1": "σ² against the Rytov variance at z = 1200 m",
    "fig2": "σ² against distance for three turbulence strengths, coherent beam",
    "fig3": "σ² against distance for two aperture radii",
    "fig4": "σ² against distance with and without the second-order cross term, two turbulence strengths",
}


def preset(name: str) -> dict[str, Any]:
    """A copy of the key/value set behind preset ``name``."""
    try:
        return dict(PRESETS[name])
    except KeyError:
        raise ConfigError([f"unknown preset {name!r}; choose one of {', '.join(PRESETS)}"]) from None
