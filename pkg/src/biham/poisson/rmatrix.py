"""
Constant and dynamical r-matrices on gl(n, C).

The constant r-matrix is r(X) = (X_> - X_<)/2 with shifts r_pm = r +- id/2.
The dynamical r-matrix R(Q) acts entrywise on off-diagonal entries with the
multipliers (lambda + 1) / (2 (lambda - 1)), lambda = Q_k / Q_l.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import NotInvertibleError, NotRegularError
from ..linalg.core import (
    DET_TOLERANCE,
    ComplexMatrix,
    as_matrix,
    commutator,
    is_diagonal,
    min_gap,
)
from ..linalg.gauss import DEFAULT_TOL_REG

logger = logging.getLogger(__name__)


def r_const(X: np.ndarray) -> ComplexMatrix:
    """r(X) = (X_> - X_<) / 2."""
    return 0.5 * (np.triu(X, 1) - np.tril(X, -1))


def r_plus(X: np.ndarray) -> ComplexMatrix:
    """r_+(X) = X_> + X_0 / 2."""
    return np.triu(X, 1) + 0.5 * np.diag(np.diag(X))


def r_minus(X: np.ndarray) -> ComplexMatrix:
    """r_-(X) = -X_< - X_0 / 2."""
    return -np.tril(X, -1) - 0.5 * np.diag(np.diag(X))


def mcybe_residual(X: np.ndarray, Y: np.ndarray) -> float:
    """
    Norm of [rX, rY] - r([rX, Y] + [X, rY]) + [X, Y]/4.

    The constant r-matrix solves the modified classical Yang-Baxter equation,
    so this vanishes up to rounding.
    """
    rX, rY = r_const(X), r_const(Y)
    lhs = commutator(rX, rY) - r_const(commutator(rX, Y) + commutator(X, rY))
    return float(np.linalg.norm(lhs + 0.25 * commutator(X, Y)))


@dataclass(frozen=True, eq=False)
class DynamicalR:
    """
    The dynamical r-matrix R(Q) for a regular diagonal Q.

    Attributes:
        Q: Regular invertible diagonal matrix
        tol_reg: Minimal admissible gap between diagonal entries
        multipliers: Off-diagonal multiplier table m_kl, zero on the diagonal
    """

    Q: np.ndarray
    tol_reg: float = DEFAULT_TOL_REG
    multipliers: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        Q = as_matrix(self.Q, "Q")
        if not is_diagonal(Q):
            raise ValueError("Q must be diagonal")
        q = np.diag(Q)
        if np.min(np.abs(q)) <= DET_TOLERANCE:
            raise NotInvertibleError(f"Q has a vanishing entry: {q.tolist()}")
        gap = min_gap(q)
        if gap < self.tol_reg:
            raise NotRegularError(
                f"Diagonal entries of Q collide (gap {gap:.3e})", gap=gap
            )
        ratio = q[:, None] / q[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            table = 0.5 * (ratio + 1.0) / (ratio - 1.0)
        np.fill_diagonal(table, 0.0)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "multipliers", table)

    def __call__(self, X: np.ndarray) -> ComplexMatrix:
        return self.multipliers * X

    def shifted(self, X: np.ndarray) -> ComplexMatrix:
        """(R(Q) + id/2)(X)."""
        return self.multipliers * X + 0.5 * X

    def bracket(self, X: np.ndarray, Y: np.ndarray) -> ComplexMatrix:
        """[X, Y]_R = [R X, Y] + [X, R Y]."""
        return commutator(self(X), Y) + commutator(X, self(Y))


def dyn_R(Q: np.ndarray, X: np.ndarray, tol_reg: float = DEFAULT_TOL_REG) -> ComplexMatrix:
    """Apply R(Q) to X."""
    return DynamicalR(Q, tol_reg)(X)


def dyn_R_coth(q: np.ndarray, X: np.ndarray) -> ComplexMatrix:
    """
    R(e^q) applied to X through the coth form: (1/2) coth((q_k - q_l)/2) X_kl.

    Args:
        q: Vector of complex logarithms of the diagonal of Q
        X: Matrix to act on
    """
    q = np.asarray(q, dtype=np.complex128)
    diff = 0.5 * (q[:, None] - q[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        table = 0.5 / np.tanh(diff)
    np.fill_diagonal(table, 0.0)
    return table * X


def r_bracket(Q: np.ndarray, X: np.ndarray, Y: np.ndarray,
              tol_reg: float = DEFAULT_TOL_REG) -> ComplexMatrix:
    """[X, Y]_{R(Q)}."""
    return DynamicalR(Q, tol_reg).bracket(X, Y)
