"""
Dense complex matrix primitives shared by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; the helpers here
validate shapes, split matrices into triangular parts and provide the trace
pairing, commutator and exponential used throughout the package.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt
from scipy.linalg import expm

from ..errors import MatrixOverflowError, NotInvertibleError, SizeMismatchError

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]

DET_TOLERANCE = 1e-12


def as_matrix(X: npt.ArrayLike, name: str = "matrix") -> ComplexMatrix:
    """
    Convert input to a square complex matrix and validate it.

    Args:
        X: Array-like input
        name: Name used in error messages

    Returns:
        Complex128 copy of the input
    """
    M = np.array(X, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if M.shape[0] < 2:
        raise SizeMismatchError(f"{name} must be at least 2x2, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def check_same_size(*matrices: np.ndarray) -> int:
    """Return the common size of the given matrices or raise SizeMismatchError."""
    sizes = {M.shape for M in matrices}
    if len(sizes) != 1:
        raise SizeMismatchError(f"Operand shapes differ: {sorted(sizes)}")
    return matrices[0].shape[0]


def basis_matrix(n: int, i: int, j: int) -> ComplexMatrix:
    """Elementary matrix e_ij (0-based indices)."""
    E = np.zeros((n, n), dtype=np.complex128)
    E[i, j] = 1.0
    return E


def trace_pairing(X: np.ndarray, Y: np.ndarray) -> complex:
    """
    The trace form <X, Y> = tr(XY).

    Args:
        X: First matrix
        Y: Second matrix

    Returns:
        tr(XY) as a Python complex
    """
    check_same_size(X, Y)
    # tr(XY) without forming the product
    return complex(np.einsum("ij,ji->", X, Y))


def commutator(X: np.ndarray, Y: np.ndarray) -> ComplexMatrix:
    """[X, Y] = XY - YX."""
    check_same_size(X, Y)
    return X @ Y - Y @ X


@dataclass(frozen=True)
class TriangularSplit:
    """Decomposition X = X_> + X_0 + X_< into strict upper, diagonal and strict lower parts."""

    strict_upper: ComplexMatrix
    diagonal: ComplexMatrix
    strict_lower: ComplexMatrix

    @property
    def off_diagonal(self) -> ComplexMatrix:
        """X_perp = X_< + X_>."""
        return self.strict_upper + self.strict_lower

    def reconstruct(self) -> ComplexMatrix:
        return self.strict_upper + self.diagonal + self.strict_lower


def split(X: np.ndarray) -> TriangularSplit:
    """
    Split a matrix into its strictly upper, diagonal and strictly lower parts.

    Args:
        X: Square matrix

    Returns:
        TriangularSplit whose parts sum to X exactly
    """
    X = np.asarray(X, dtype=np.complex128)
    return TriangularSplit(
        strict_upper=np.triu(X, 1),
        diagonal=np.diag(np.diag(X)),
        strict_lower=np.tril(X, -1),
    )


def diagonal_part(X: np.ndarray) -> ComplexMatrix:
    """X_0, the diagonal part of X as a matrix."""
    return np.diag(np.diag(X)).astype(np.complex128)


def is_diagonal(X: np.ndarray, tol: float = 0.0) -> bool:
    off = X - np.diag(np.diag(X))
    return bool(np.all(np.abs(off) <= tol))


def mat_exp(X: np.ndarray) -> ComplexMatrix:
    """
    Matrix exponential.

    Diagonal inputs are exponentiated entrywise so that exp(0) = I exactly;
    everything else goes through scipy's scaling-and-squaring Pade scheme.

    Args:
        X: Square matrix with finite entries

    Returns:
        exp(X)

    Raises:
        MatrixOverflowError: If the result is not finite
    """
    X = np.asarray(X, dtype=np.complex128)
    if is_diagonal(X):
        with np.errstate(over="ignore", invalid="ignore"):
            result = np.diag(np.exp(np.diag(X))).astype(np.complex128)
    else:
        with np.errstate(over="ignore", invalid="ignore"):
            result = np.asarray(expm(X), dtype=np.complex128)
    if not np.all(np.isfinite(result)):
        raise MatrixOverflowError(
            f"exp overflowed for input of norm {np.linalg.norm(X):.3e}"
        )
    return result


def inverse(g: np.ndarray) -> ComplexMatrix:
    """Inverse of an invertible matrix, raising NotInvertibleError near singularity."""
    det = np.linalg.det(g)
    if abs(det) <= DET_TOLERANCE:
        raise NotInvertibleError(f"|det| = {abs(det):.3e} is below {DET_TOLERANCE}")
    return np.linalg.inv(g)


def is_hermitian(X: np.ndarray, tol: float = 1e-14) -> bool:
    return bool(np.linalg.norm(X - X.conj().T) <= tol * max(1.0, np.linalg.norm(X)))


def random_matrix(rng: np.random.Generator, n: int, scale: float = 1.0) -> ComplexMatrix:
    """Random complex Gaussian matrix with entries of variance scale**2."""
    re = rng.standard_normal((n, n))
    im = rng.standard_normal((n, n))
    return (scale / np.sqrt(2.0)) * (re + 1j * im)


def random_near_identity(rng: np.random.Generator, n: int,
                         radius: float) -> ComplexMatrix:
    """Random matrix I + X with Frobenius norm of X at most radius."""
    X = random_matrix(rng, n)
    X *= radius * rng.uniform(0.2, 1.0) / np.linalg.norm(X)
    return np.eye(n, dtype=np.complex128) + X


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> ComplexMatrix:
    A = random_matrix(rng, n, scale)
    return 0.5 * (A + A.conj().T)


def min_gap(values: np.ndarray) -> float:
    """Smallest pairwise distance between entries of a vector."""
    values = np.asarray(values)
    if values.size < 2:
        return np.inf
    diffs = np.abs(values[:, None] - values[None, :])
    diffs[np.diag_indices(values.size)] = np.inf
    return float(diffs.min())


def relative_residual(A: np.ndarray, B: np.ndarray,
                      scale: Optional[float] = None) -> float:
    """‖A - B‖ / max(1, scale) with scale defaulting to ‖B‖."""
    ref = np.linalg.norm(B) if scale is None else scale
    return float(np.linalg.norm(A - B) / max(1.0, ref))

