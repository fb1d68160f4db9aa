"""
Gauss (triangular) factorization without pivoting and regular diagonalization.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from ..errors import (
    BranchCutError,
    NotInvertibleError,
    NotRegularError,
    SingularMinorError,
)
from .core import DET_TOLERANCE, ComplexMatrix, as_matrix, is_diagonal, min_gap

logger = logging.getLogger(__name__)

PIVOT_TOLERANCE = 1e-12
BRANCH_TOLERANCE = 1e-10
DEFAULT_TOL_REG = 1e-8


class GaussOrder(Enum):
    """Order of the unipotent factors around the diagonal one."""

    UPPER_DIAG_LOWER = "upper-diag-lower"
    LOWER_DIAG_UPPER = "lower-diag-upper"


@dataclass(frozen=True)
class GaussFactors:
    """Unipotent triangular factors and the diagonal factor of a matrix."""

    upper_unipotent: ComplexMatrix
    diagonal: ComplexMatrix
    lower_unipotent: ComplexMatrix
    order: GaussOrder

    def recompose(self) -> ComplexMatrix:
        """Multiply the factors back in the stated order."""
        if self.order is GaussOrder.UPPER_DIAG_LOWER:
            return self.upper_unipotent @ self.diagonal @ self.lower_unipotent
        return self.lower_unipotent @ self.diagonal @ self.upper_unipotent


def _lower_diag_upper(A: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Doolittle elimination, no row exchanges
    n = A.shape[0]
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    U = A.astype(np.complex128).copy()
    L = np.eye(n, dtype=np.complex128)
    for k in range(n):
        pivot = U[k, k]
        if abs(pivot) < PIVOT_TOLERANCE * scale:
            raise SingularMinorError(
                f"Pivot {k} has magnitude {abs(pivot):.3e} "
                f"(threshold {PIVOT_TOLERANCE * scale:.3e})"
            )
        factors = U[k + 1:, k] / pivot
        L[k + 1:, k] = factors
        U[k + 1:, k:] -= np.outer(factors, U[k, k:])
    d = np.diag(U).copy()
    upper = np.triu(U / d[:, None])
    np.fill_diagonal(upper, 1.0)
    return L, np.diag(d), upper


def gauss_decompose(A: np.ndarray,
                    order: GaussOrder = GaussOrder.UPPER_DIAG_LOWER) -> GaussFactors:
    """
    Factor a matrix into unipotent triangular and diagonal factors.

    Args:
        A: Square matrix whose leading (lower-diag-upper) or trailing
           (upper-diag-lower) principal minors are nonzero
        order: Which factor comes first

    Returns:
        GaussFactors reproducing A

    Raises:
        SingularMinorError: If a pivot falls below 1e-12 * ||A||
    """
    A = as_matrix(A, "A")
    if order is GaussOrder.LOWER_DIAG_UPPER:
        L, D, U = _lower_diag_upper(A)
        return GaussFactors(upper_unipotent=U, diagonal=D, lower_unipotent=L,
                            order=order)

    # Reversing rows and columns turns trailing minors into leading ones
    # and swaps the roles of upper and lower factors.
    L, D, U = _lower_diag_upper(A[::-1, ::-1])
    return GaussFactors(
        upper_unipotent=np.ascontiguousarray(L[::-1, ::-1]),
        diagonal=np.ascontiguousarray(D[::-1, ::-1]),
        lower_unipotent=np.ascontiguousarray(U[::-1, ::-1]),
        order=order,
    )


def principal_sqrt_diagonal(D: np.ndarray) -> ComplexMatrix:
    """
    Principal square root of an invertible diagonal matrix.

    Raises:
        BranchCutError: If an entry lies on the negative real axis
    """
    d = np.diag(D).astype(np.complex128)
    on_cut = (d.real < 0) & (np.abs(d.imag) <= BRANCH_TOLERANCE * np.abs(d))
    if np.any(on_cut):
        raise BranchCutError(
            f"Diagonal entries {d[on_cut].tolist()} lie on the negative real axis"
        )
    return np.diag(np.sqrt(d))


def diagonalize_regular(g: np.ndarray,
                        tol_reg: float = DEFAULT_TOL_REG) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """
    Conjugate a regular matrix to diagonal form with sorted eigenvalues.

    Eigenvalues are sorted ascending by (real part, imaginary part), with real
    parts closer than tol_reg treated as equal. Each
    eigenvector is scaled to unit norm with its largest entry real positive,
    which fixes eta deterministically.

    Args:
        g: Invertible matrix with distinct eigenvalues
        tol_reg: Minimal admissible eigenvalue gap

    Returns:
        Tuple (eta, Q) with eta @ g @ inv(eta) = Q diagonal

    Raises:
        NotInvertibleError: If det(g) is numerically zero
        NotRegularError: If two eigenvalues are closer than tol_reg
    """
    g = as_matrix(g, "g")
    n = g.shape[0]
    det = np.linalg.det(g)
    if abs(det) <= DET_TOLERANCE:
        raise NotInvertibleError(f"|det g| = {abs(det):.3e}")

    if is_diagonal(g):
        values = np.diag(g).copy()
        order = _eigenvalue_order(values, tol_reg)
        values = values[order]
        _check_gap(values, tol_reg)
        eta = np.eye(n, dtype=np.complex128)[order]
        return eta, np.diag(values)

    values, vectors = np.linalg.eig(g)
    order = _eigenvalue_order(values, tol_reg)
    values = values[order]
    vectors = vectors[:, order]
    _check_gap(values, tol_reg)

    for k in range(n):
        column = vectors[:, k]
        pivot = column[np.argmax(np.abs(column))]
        vectors[:, k] = column * (abs(pivot) / pivot) / np.linalg.norm(column)

    eta = np.linalg.inv(vectors)
    return eta, np.diag(values)


def _eigenvalue_order(values: np.ndarray, tol: float) -> np.ndarray:
    """Ascending (real, imag) order with real parts within tol snapped together."""
    by_real = np.argsort(values.real, kind="stable")
    keys = np.empty(len(values))
    anchor = values.real[by_real[0]]
    for k in by_real:
        if values.real[k] - anchor > tol:
            anchor = values.real[k]
        keys[k] = anchor
    return np.lexsort((values.imag, keys))


def _check_gap(values: np.ndarray, tol_reg: float) -> None:
    gap = min_gap(values)
    if gap < tol_reg:
        raise NotRegularError(
            f"Eigenvalue gap {gap:.3e} is below tol_reg={tol_reg:.1e}", gap=gap
        )
