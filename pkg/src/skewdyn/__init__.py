"""Numerics for skew products of finitely many rational maps."""

__version__ = "0.1.0"
