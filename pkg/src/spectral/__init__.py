"""
Hermite basis, Hermite-Sobolev spaces and banded differential operators.
"""
