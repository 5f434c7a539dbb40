"""Exact tropical-vertex factorizations, quiver moduli Euler characteristics and GW invariants."""

__version__ = "0.1.0"
