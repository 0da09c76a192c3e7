"""Exact construction and certification of symplectic forms on singular affine Poisson varieties."""

__version__ = "0.1.0"
