"""Floquet engineering of three-body spin interactions."""

__version__ = "0.1.0"
