"""Exact tools for noncontextual ontological models of prepare-measure data."""

__version__ = "0.1.0"
