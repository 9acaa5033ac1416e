"""
Scintillation index of laser beams in weak-to-moderate turbulence.
"""

__version__ = "0.1.0"
