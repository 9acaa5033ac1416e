"""
Tests for the von Karman spectrum.
"""

import math

import numpy as np
import pytest
from scipy.constants import c

from beamscint.src.errors import ParameterError, SingularInputError
from beamscint.src.physics.spectrum import (
    SpectrumParams,
    collision_frequency,
    normalized_psi,
    psi,
    psi_scale,
)


@pytest.fixture
def spectrum():
    return SpectrumParams(cn2=1e-14, l0=2.0 * math.pi * 1e-3)


class TestPsi:
    """Spectrum values and shape."""

    def test_formula(self, spectrum):
        """ψ = 0.033 Cn² exp(−k²/km²) k^(−11/3) without an outer scale."""
        k = 500.0
        expected = 0.033 * 1e-14 * math.exp(-0.25) / k ** (11 / 3)
        assert psi(k, spectrum) == pytest.approx(expected, rel=1e-12)

    def test_outer_scale_rolloff(self):
        """The outer scale keeps ψ finite at k = 0."""
        s = SpectrumParams(cn2=1e-14, l0=6.3e-3, inv_L0_sq=1.0)
        assert psi(0.0, s) == pytest.approx(0.033 * 1e-14)

    def test_decreasing(self, spectrum):
        """ψ decreases with k."""
        k = np.geomspace(1.0, 1e4, 200)
        values = psi(k, spectrum)
        assert np.all(np.diff(values) < 0)

    def test_bounded_by_power_law(self, spectrum):
        """The inner-scale cutoff only lowers ψ."""
        k = np.geomspace(1.0, 1e4, 50)
        assert np.all(psi(k, spectrum) <= 0.033 * 1e-14 * k ** (-11 / 3))

    def test_linear_in_cn2(self, spectrum):
        """ψ is linear in Cn²."""
        assert psi(300.0, spectrum.scaled(3.0)) == pytest.approx(3.0 * psi(300.0, spectrum), rel=1e-14)

    def test_vectorized_shape(self, spectrum):
        """Array input keeps its shape."""
        k = np.ones((3, 4)) * 100.0
        assert psi(k, spectrum).shape == (3, 4)

    def test_zero_wavenumber_diverges(self, spectrum):
        """k = 0 without an outer scale is singular."""
        with pytest.raises(SingularInputError):
            psi(0.0, spectrum)

    def test_negative_wavenumber(self, spectrum):
        """Negative wavenumbers are rejected."""
        with pytest.raises(ParameterError):
            psi(-1.0, spectrum)

    def test_normalized_form(self, spectrum):
        """ψ_scale·ψ̂(k/kl) reproduces ψ."""
        x = np.array([0.1, 0.5, 1.0, 3.0])
        k_l = spectrum.inner_wavenumber
        assert np.allclose(psi_scale(spectrum) * normalized_psi(x, spectrum), psi(x * k_l, spectrum), rtol=1e-12)
        assert isinstance(normalized_psi(0.5, spectrum), float)


class TestCollisionFrequency:
    """Collision-rate estimate."""

    def test_formula(self, spectrum):
        """ν = (2πω0²/c)·ψ(k)·k²."""
        omega0 = c * 1e7
        k = 1000.0
        expected = 2 * math.pi * omega0**2 / c * psi(k, spectrum) * k**2
        assert collision_frequency(spectrum, omega0, k) == pytest.approx(expected)

    def test_rejects_zero_wavenumber(self, spectrum):
        """The collision rate needs a positive wavenumber."""
        with pytest.raises(ParameterError):
            collision_frequency(spectrum, 1.0, 0.0)
