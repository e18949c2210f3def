"""
Scoring of learned models, result summaries and plots.
"""
