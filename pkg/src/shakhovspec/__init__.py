"""Spectral analysis of the linearized Shakhov kinetic model.

Computes, classifies and tracks the discrete spectrum through a
closed-form spectral function, and derives the finite-dimensional linear
hydrodynamic closure from the resulting eigenvectors.
"""
from .spectral import ModelParams, SpectralPoint, WaveContext

__version__ = "0.1.0"

__all__ = ["ModelParams", "WaveContext", "SpectralPoint", "__version__"]
