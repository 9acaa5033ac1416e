"""
Physical model: channel parameters, turbulence spectrum, beam and kinetic terms.
"""
