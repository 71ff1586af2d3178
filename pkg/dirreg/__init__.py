"""Directional well-posedness of set-valued mappings, checked on finite grids."""

__version__ = "0.1.0"
