"""Biographical event detection, corpus harmonization and intersectional
word-shift analysis."""

__version__ = "0.1.0"
