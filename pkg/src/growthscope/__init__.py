"""Multiscale growth-rate analysis of GDP-like series with a slope-calibrated wavelet."""
__version__ = "0.1.0"
