"""Hyperbolic random graphs, greedy and exact vertex covers, and sector-run diagnostics."""

__version__ = "0.1.0"
