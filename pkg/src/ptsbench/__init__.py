"""Atomic bases, base-extension consequence, argument structures with
reductions, validity checking, and BHK-style constructions."""

__version__ = "0.1.0"
