"""Exact enumeration of Bethe states through QQ-relations on Young diagrams."""

__version__ = "0.1.0"
