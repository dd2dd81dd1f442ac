"""Finite combinatorics of hereditary families over the Cantor tree."""

__version__ = "0.1.0"
