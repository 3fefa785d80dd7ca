"""Exact finite-field laboratory for toy shtukas, horospherical divisor
calculus, finite Radon transforms and truncated Tate-space Fourier analysis."""

__version__ = "0.1.0"
