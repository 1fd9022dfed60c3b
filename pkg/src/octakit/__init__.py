"""Octahedral coordinates of knot and tangle diagrams from SL(2,C) representations."""

__version__ = "0.1.0"
