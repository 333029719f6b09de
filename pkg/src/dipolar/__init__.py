"""Spectral tools for Schroedinger operators with several anisotropic inverse-square singularities."""
__version__ = "0.1.0"
