"""Finite-scale toolkit for Gowers norms, phase polynomials, cocycles,
cube measures and filtered abelian group algebra."""

__version__ = "0.1.0"
