"""Hilbert-Eisenstein series, Mathai-Quillen theta kernels, and regularized torus periods."""

__version__ = "0.1.0"
