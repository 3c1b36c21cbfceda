"""Exact enumeration and surgery toolkit for lattice walks and polygons."""

__version__ = "0.1.0"
