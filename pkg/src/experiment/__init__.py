"""
Experiment configuration, validation, orchestration and result writers.
"""
