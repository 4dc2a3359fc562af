"""Exact toolkit for formal meromorphic connections and their Fourier-Laplace theory."""

__version__ = "0.1.0"
