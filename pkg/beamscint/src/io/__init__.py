"""
Run configuration, figure presets, result cache and CSV/metadata output.
"""
