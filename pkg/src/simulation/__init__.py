"""
Galerkin theta-scheme simulation and the exact translation oracle.
"""
