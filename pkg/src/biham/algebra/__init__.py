"""
Exact polynomial Poisson algebra used for Jacobi and compatibility certificates.
"""
from .gaussian import GaussianRational
from .poly import Poly, StructureTable, jacobi_sweep, poly_bracket

__all__ = ["GaussianRational", "Poly", "StructureTable", "jacobi_sweep", "poly_bracket"]
