"""Exact checks for bounding-pair generation of Torelli groups at fixed genus."""

__version__ = "0.1.0"
