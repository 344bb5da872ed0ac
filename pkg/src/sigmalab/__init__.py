"""Executable computability objects: busy beavers, K-complexity, recursion theorem, ordinal notations."""

__version__ = "0.1.0"
