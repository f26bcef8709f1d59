"""Numerical services: Hankel/Lanczos estimation, order selection, Debye synthesis, noise and benchmarks."""
