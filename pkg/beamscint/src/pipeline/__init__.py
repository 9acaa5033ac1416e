"""
Assembly of the scintillation index and parameter sweeps.
"""
