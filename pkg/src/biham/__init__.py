"""
biham - bi-Hamiltonian holomorphic spin Sutherland hierarchy

Numerical and exact verification of the two compatible Poisson brackets on
G x gl(n, C), their reduction to the spin Sutherland model, the hierarchy
flows, the real slices and the Heisenberg double picture.
"""

__version__ = "0.1.0"

from . import algebra, dynamics, heisenberg, linalg, poisson

__all__ = ["algebra", "dynamics", "heisenberg", "linalg", "poisson"]
