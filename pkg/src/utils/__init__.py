"""
Shared utilities: environment settings, error types and logging setup.
"""
