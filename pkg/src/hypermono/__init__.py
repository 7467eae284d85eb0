"""Hyperbolic digraph, self-embedding and monoid growth toolkit on finite windows."""

__version__ = "0.1.0"
