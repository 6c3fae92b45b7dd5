"""Exponent polytopes for Brascamp-Lieb forms built from vertical projections
on the Heisenberg group, with numerical witness checks."""

__version__ = "0.1.0"
