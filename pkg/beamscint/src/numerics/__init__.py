"""
Deterministic and stochastic integration engine.
"""
