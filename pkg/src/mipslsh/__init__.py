"""Symmetric and asymmetric locality-sensitive hashing for maximum inner product search."""

__version__ = "0.1.0"
