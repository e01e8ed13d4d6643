"""
Monotonicity constant estimation for the pair (L, A).
"""
