"""Substitution tilings: symbolic, geometric and combinatorial rules with spectral and geometric diagnostics."""

__version__ = "0.1.0"
