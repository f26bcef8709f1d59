"""HLSVD-PRO filtering of X-ray diffraction intensity profiles."""

__version__ = "0.1.0"
