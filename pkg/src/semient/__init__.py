"""Entropy of flows computed through normed semigroups."""

__version__ = "0.1.0"
