"""Duality toolkit for problems mixing linear terms with block gauge functions."""
__version__ = "0.1.0"
