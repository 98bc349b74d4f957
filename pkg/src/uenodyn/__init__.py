"""Exact computations for Ueno-type quotients of abelian varieties and their dynamics."""

__version__ = "0.1.0"
