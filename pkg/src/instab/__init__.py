"""Numerical laboratory for instability and nonlinear stabilization of discrete maps."""

__version__ = "0.1.0"
