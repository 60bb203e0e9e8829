"""Twisted unitary generators over GF(q)[t, 1/t], their finite specialisations, and expansion checks."""

__version__ = "0.1.0"
