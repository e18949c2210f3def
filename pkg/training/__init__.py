"""
Experiment driving: configuration, noisy dataset generation and the benchmark sweep.
"""
