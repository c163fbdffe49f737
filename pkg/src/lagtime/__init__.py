"""Laguerre-mode time/energy representation toolkit."""

__version__ = "0.1.0"
