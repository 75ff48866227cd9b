"""Exact and p-adic computations around the unipotent fundamental group of a curve."""

__version__ = "0.1.0"
