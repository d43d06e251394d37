"""Numerical checks for the frequency and oscillation estimates of planar Q-valued maps."""

__version__ = "0.1.0"
