"""
Reference channels shared by the tests, matching the fig1 and fig2 presets.
"""

import math

from beamscint.src.physics.params import PhysicalParams, cn2_for_sigma1_sq


def fig1_params(sigma1_sq: float = 0.05) -> PhysicalParams:
    """fig1 channel with Cn² chosen for the requested Rytov variance."""
    return PhysicalParams(
        cn2=cn2_for_sigma1_sq(sigma1_sq, 1.29e7, 1200.0),
        l0=6.3e-3,
        q0=1.29e7,
        z=1200.0,
        r0=0.01,
    )


def fig2_params(z: float = 1000.0, cn2: float = 1e-14, r0: float = 0.01) -> PhysicalParams:
    return PhysicalParams(cn2=cn2, l0=2.0 * math.pi * 1e-3, q0=1e7, z=z, r0=r0)
