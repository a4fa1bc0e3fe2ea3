"""Compiled kernel extension package (built from _kernels.pyx)."""
