"""
Domain exceptions raised across biham.
"""

from typing import Optional


class BihamError(Exception):
    """Base class for all biham domain errors."""


class SizeMismatchError(BihamError, ValueError):
    """Operands have incompatible sizes."""


class NotRegularError(BihamError):
    """A matrix has (nearly) repeated eigenvalues.

    Attributes:
        gap: Smallest eigenvalue gap that was found, if known
        z: Flow parameter at which the collision was detected, if any
    """

    def __init__(self, message: str, gap: Optional[float] = None,
                 z: Optional[complex] = None):
        super().__init__(message)
        self.gap = gap
        self.z = z


class NotInvertibleError(BihamError):
    """Determinant is numerically zero."""


class SingularMinorError(BihamError):
    """Gauss factorization hit a vanishing pivot."""


class BranchCutError(BihamError):
    """Principal square root requested on the negative real axis."""


class MatrixOverflowError(BihamError, ArithmeticError):
    """Matrix exponential produced non-finite entries."""


class InvarianceViolatedError(BihamError):
    """An observable assumed invariant under conjugation is not."""


class SymmetryClassError(BihamError):
    """Derivatives on a real slice are outside their symmetry class."""


class ConfigurationError(BihamError, ValueError):
    """Run configuration is invalid."""
