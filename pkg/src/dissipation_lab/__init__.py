"""Numerical laboratory for doubled-coordinate dissipative systems."""

from .model import DerivedParams, OscillatorParams, derive_params

__all__ = ["OscillatorParams", "DerivedParams", "derive_params"]
__version__ = "0.1.0"
