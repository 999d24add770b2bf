"""Consensus certificates for networks of identical polynomial agents."""

__version__ = "0.1.0"
