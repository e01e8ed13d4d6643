"""
Stability, tail-mass and invariant-measure diagnostics on simulation output.
"""
