"""Vanishing-viscosity resolvents for scalar conservation laws with a flux jump at x = 0."""

__version__ = "0.1.0"
