"""
Poisson reduction by simultaneous conjugation.

Invariant observables are restricted to the slice of regular diagonal g,
where both brackets take an explicit form built from the dynamical r-matrix.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

import numpy as np

from ..errors import InvarianceViolatedError, NotInvertibleError, NotRegularError
from ..linalg.core import (
    DET_TOLERANCE,
    ComplexMatrix,
    as_matrix,
    check_same_size,
    commutator,
    diagonal_part,
    is_diagonal,
    min_gap,
    trace_pairing,
)
from ..linalg.gauss import DEFAULT_TOL_REG, diagonalize_regular
from ..poisson.observables import Observable, PhasePoint
from ..poisson.rmatrix import DynamicalR

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ReducedPoint:
    """
    A point (Q, L) with Q regular, invertible and diagonal.

    Attributes:
        Q: Diagonal matrix with pairwise distinct nonzero entries
        L: Lie-algebra element
        tol_reg: Minimal admissible gap between entries of Q
    """

    Q: ComplexMatrix
    L: ComplexMatrix
    tol_reg: float = DEFAULT_TOL_REG

    def __post_init__(self) -> None:
        Q = as_matrix(self.Q, "Q")
        L = as_matrix(self.L, "L")
        check_same_size(Q, L)
        if not is_diagonal(Q):
            raise ValueError("Q must be diagonal")
        q = np.diag(Q)
        if np.min(np.abs(q)) <= DET_TOLERANCE:
            raise NotInvertibleError(f"Q has a vanishing entry: {q.tolist()}")
        gap = min_gap(q)
        if gap < self.tol_reg:
            raise NotRegularError(f"Entries of Q collide (gap {gap:.3e})", gap=gap)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "L", L)

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    @property
    def q(self) -> np.ndarray:
        """Diagonal of Q as a vector."""
        return np.diag(self.Q)

    @cached_property
    def R(self) -> DynamicalR:
        return DynamicalR(self.Q, self.tol_reg)

    def as_phase_point(self) -> PhasePoint:
        return PhasePoint(self.Q, self.L)

    def gauge(self, D: np.ndarray) -> "ReducedPoint":
        """Residual symmetry: conjugate L by an invertible diagonal matrix D."""
        if not is_diagonal(D):
            raise ValueError("Gauge transformations must be diagonal")
        d = np.diag(D)
        return ReducedPoint(self.Q, (d[:, None] * self.L) / d[None, :], self.tol_reg)


def project(p: PhasePoint,
            tol_reg: float = DEFAULT_TOL_REG) -> Tuple[ReducedPoint, ComplexMatrix]:
    """
    Conjugate (g, L) so that g becomes sorted diagonal.

    Args:
        p: Point with regular g
        tol_reg: Minimal eigenvalue gap

    Returns:
        Tuple (reduced point, eta) with eta g eta^-1 = Q

    Raises:
        NotRegularError: If g has (nearly) repeated eigenvalues
    """
    eta, Q = diagonalize_regular(p.g, tol_reg)
    L = eta @ p.L @ np.linalg.inv(eta)
    logger.debug(f"Projected point with spectrum {np.diag(Q).tolist()}")
    return ReducedPoint(Q, L, tol_reg), eta


@dataclass(frozen=True, eq=False)
class ReducedDerivatives:
    """Diagonal nabla_1 f and d_2 f of a reduced function at (Q, L)."""

    nabla1: ComplexMatrix
    d2: ComplexMatrix
    L: ComplexMatrix

    @property
    def nabla2(self) -> ComplexMatrix:
        return self.L @ self.d2

    @property
    def nabla2p(self) -> ComplexMatrix:
        return self.d2 @ self.L


class ReducedObservable:
    """Restriction of an invariant observable to the reduced phase space."""

    def __init__(self, F: Observable):
        if not F.invariant:
            raise InvarianceViolatedError(
                f"Only invariant observables can be restricted, got {F.label}"
            )
        self.F = F

    @property
    def label(self) -> str:
        return self.F.label

    def evaluate(self, rp: ReducedPoint) -> complex:
        return self.F.evaluate(rp.as_phase_point())

    def derivatives(self, rp: ReducedPoint) -> ReducedDerivatives:
        b = self.F.derivatives(rp.as_phase_point())
        return ReducedDerivatives(diagonal_part(b.nabla1), b.d2, rp.L)

    def __repr__(self) -> str:
        return f"<ReducedObservable {self.label}>"


def restrict(F: Observable) -> ReducedObservable:
    return ReducedObservable(F)


def reduced_pb1(f: ReducedObservable, h: ReducedObservable, rp: ReducedPoint) -> complex:
    """<nabla1 f, d2 h> - <nabla1 h, d2 f> + <L, [d2 f, d2 h]_R(Q)>."""
    bf, bh = f.derivatives(rp), h.derivatives(rp)
    return (trace_pairing(bf.nabla1, bh.d2)
            - trace_pairing(bh.nabla1, bf.d2)
            + trace_pairing(rp.L, rp.R.bracket(bf.d2, bh.d2)))


def reduced_pb2(f: ReducedObservable, h: ReducedObservable, rp: ReducedPoint) -> complex:
    """
    Reduced second bracket.

    1/2 <nabla1 f, nabla2 h + nabla2' h> - 1/2 <nabla1 h, nabla2 f + nabla2' f>
    + <nabla2 f, R(Q) nabla2 h> - <nabla2' f, R(Q) nabla2' h>.
    """
    bf, bh = f.derivatives(rp), h.derivatives(rp)
    R = rp.R
    return (0.5 * trace_pairing(bf.nabla1, bh.nabla2 + bh.nabla2p)
            - 0.5 * trace_pairing(bh.nabla1, bf.nabla2 + bf.nabla2p)
            + trace_pairing(bf.nabla2, R(bh.nabla2))
            - trace_pairing(bf.nabla2p, R(bh.nabla2p)))


def derivative_relation_residuals(F: Observable, rp: ReducedPoint) -> Tuple[float, float]:
    """
    Residuals of the relations between reduced and unreduced derivatives.

    Returns:
        (‖diag [L, d2 f]‖, ‖nabla1 F - nabla1 f + (R(Q) + 1/2)[L, d2 f]‖)
    """
    b = F.derivatives(rp.as_phase_point())
    nabla1_f = diagonal_part(b.nabla1)
    C = commutator(rp.L, b.d2)
    res_diag = float(np.linalg.norm(np.diag(C)))
    res_full = float(np.linalg.norm(b.nabla1 - nabla1_f + rp.R.shifted(C)))
    return res_diag, res_full


def reduced_vf(m: int, rp: ReducedPoint) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """
    Reduced Hamiltonian vector field of h_m = tr(L^m)/m for the second bracket.

    Returns:
        (Qdot, Ldot) = ((L^m)_0 Q, [R(Q) L^m, L])
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    Lm = np.linalg.matrix_power(rp.L, m)
    Qdot = diagonal_part(Lm) @ rp.Q
    Ldot = commutator(rp.R(Lm), rp.L)
    return Qdot, Ldot


def vector_field_action(f: ReducedObservable, Qdot: np.ndarray, Ldot: np.ndarray,
                        rp: ReducedPoint) -> complex:
    """<nabla1 f, Q^-1 Qdot> + <d2 f, Ldot>."""
    b = f.derivatives(rp)
    return (trace_pairing(b.nabla1, Qdot / np.diag(rp.Q)[:, None])
            + trace_pairing(b.d2, Ldot))
