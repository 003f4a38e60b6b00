"""Certified guessing probabilities for unambiguous, fixed-inconclusive and fixed-error eavesdroppers."""

__version__ = "0.1.0"
