"""Exact root-system combinatorics and Lyapunov-spectrum tools for
conformal lattice actions."""

__version__ = "0.1.0"
