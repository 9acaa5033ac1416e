"""
Gaussian-beam scintillation toolkit.

This package contains the numerical core and the command-line front end.
"""
