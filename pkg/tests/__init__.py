"""
End-to-end tests for the scintillation toolkit.

This package exercises the CLI, sweeps and on-disk artifacts.
"""
