"""Numerical laboratory for Blaschke circle dynamics and quadratic Siegel disks."""

__version__ = "0.1.0"
