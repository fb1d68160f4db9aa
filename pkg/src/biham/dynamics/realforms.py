"""
Hyperbolic and trigonometric real slices of the reduced phase space.

On the hyperbolic slice (Q = e^q, q real, L Hermitian) both reduced brackets
of real invariant functions are real; on the trigonometric slice
(Q = e^{iq}, q real, L Hermitian) they are purely imaginary.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np

from ..errors import SymmetryClassError
from ..linalg.core import ComplexMatrix, as_matrix, is_hermitian, random_hermitian
from ..linalg.gauss import DEFAULT_TOL_REG
from ..poisson.observables import Observable, TraceWordObservable
from ..poisson.rmatrix import DynamicalR
from .hierarchy import Trajectory, integrate_reduced
from .reduction import ReducedObservable, ReducedPoint

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12


class SliceKind(Enum):
    HYPERBOLIC = "hyp"
    TRIGONOMETRIC = "trig"


@dataclass(frozen=True, eq=False)
class SlicePoint:
    """
    A point of a real slice: real positions q and Hermitian L.

    Attributes:
        kind: Which slice; Q = e^q (hyperbolic) or Q = e^{iq} (trigonometric)
        q: Real positions
        L: Hermitian matrix
    """

    kind: SliceKind
    q: np.ndarray
    L: ComplexMatrix
    tol_reg: float = DEFAULT_TOL_REG

    def __post_init__(self) -> None:
        q = np.asarray(self.q)
        if q.ndim == 2:
            q = np.diag(q)
        if np.iscomplexobj(q):
            if np.max(np.abs(q.imag)) > 0:
                raise ValueError("Slice positions q must be real")
            q = q.real
        q = q.astype(float)
        L = as_matrix(self.L, "L")
        if L.shape[0] != q.size:
            raise ValueError(f"q has {q.size} entries but L is {L.shape}")
        if not is_hermitian(L):
            raise ValueError("L must be Hermitian on a real slice")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "L", L)

    @property
    def Q(self) -> ComplexMatrix:
        if self.kind is SliceKind.HYPERBOLIC:
            return np.diag(np.exp(self.q)).astype(np.complex128)
        return np.diag(np.exp(1j * self.q))

    def to_reduced(self) -> ReducedPoint:
        return ReducedPoint(self.Q, self.L, self.tol_reg)


def HyperbolicPoint(q: np.ndarray, L: np.ndarray,
                    tol_reg: float = DEFAULT_TOL_REG) -> SlicePoint:
    return SlicePoint(SliceKind.HYPERBOLIC, q, L, tol_reg)


def TrigPoint(q: np.ndarray, L: np.ndarray,
              tol_reg: float = DEFAULT_TOL_REG) -> SlicePoint:
    return SlicePoint(SliceKind.TRIGONOMETRIC, q, L, tol_reg)


@dataclass(frozen=True, eq=False)
class RealDerivatives:
    """
    Derivatives of a real function on a slice.

    Hyperbolic: nabla1 real diagonal, d2 Hermitian.
    Trigonometric: D1 = i nabla1 real diagonal, D2 = i d2 anti-Hermitian.
    """

    kind: SliceKind
    nabla1: ComplexMatrix
    d2: ComplexMatrix
    L: ComplexMatrix

    @property
    def D1(self) -> ComplexMatrix:
        return 1j * self.nabla1

    @property
    def D2(self) -> ComplexMatrix:
        return 1j * self.d2


def _hermitian_defect(X: np.ndarray) -> float:
    return float(np.linalg.norm(X - X.conj().T) / max(1.0, np.linalg.norm(X)))


def _check_class(kind: SliceKind, nabla1: np.ndarray, d2: np.ndarray, label: str) -> None:
    diag = np.diag(nabla1)
    scale = max(1.0, float(np.linalg.norm(diag)))
    if kind is SliceKind.HYPERBOLIC:
        off_class = float(np.linalg.norm(diag.imag)) / scale
    else:
        off_class = float(np.linalg.norm(diag.real)) / scale
    if off_class > SYMMETRY_TOL:
        raise SymmetryClassError(
            f"{label}: nabla1 leaves its class on the {kind.value} slice ({off_class:.2e})"
        )
    defect = _hermitian_defect(d2)
    if defect > SYMMETRY_TOL:
        raise SymmetryClassError(
            f"{label}: d2 is not Hermitian on the {kind.value} slice ({defect:.2e})"
        )


def real_derivatives(f: ReducedObservable, point: SlicePoint) -> RealDerivatives:
    """
    Derivatives of f on the slice with their symmetry classes asserted.

    Raises:
        SymmetryClassError: If f is not real-valued on the slice
    """
    b = f.derivatives(point.to_reduced())
    _check_class(point.kind, b.nabla1, b.d2, f.label)
    return RealDerivatives(point.kind, b.nabla1, b.d2, point.L)


def _re(X: np.ndarray, Y: np.ndarray) -> float:
    return float(np.einsum("ij,ji->", X, Y).real)


def _im(X: np.ndarray, Y: np.ndarray) -> float:
    return float(np.einsum("ij,ji->", X, Y).imag)


def hyp_pb(i: int, f: ReducedObservable, h: ReducedObservable,
           point: SlicePoint) -> float:
    """
    Real brackets on the hyperbolic slice with <X, Y>_R = Re tr(XY).

    Args:
        i: 1 or 2
        f: Real invariant function
        h: Real invariant function
        point: Hyperbolic slice point
    """
    if point.kind is not SliceKind.HYPERBOLIC:
        raise ValueError("hyp_pb needs a hyperbolic slice point")
    df, dh = real_derivatives(f, point), real_derivatives(h, point)
    R = DynamicalR(point.Q, point.tol_reg)
    L = point.L
    if i == 1:
        return (_re(df.nabla1, dh.d2) - _re(dh.nabla1, df.d2)
                + _re(L, R.bracket(df.d2, dh.d2)))
    if i == 2:
        A, B = L @ df.d2, L @ dh.d2
        return _re(df.nabla1, B) - _re(dh.nabla1, A) + 2.0 * _re(A, R(B))
    raise ValueError(f"Bracket index must be 1 or 2, got {i}")


def trig_pb(i: int, f: ReducedObservable, h: ReducedObservable,
            point: SlicePoint) -> complex:
    """
    Purely imaginary brackets on the trigonometric slice, <X, Y>_I = Im tr(XY).

    Args:
        i: 1 or 2
        f: Real invariant function
        h: Real invariant function
        point: Trigonometric slice point
    """
    if point.kind is not SliceKind.TRIGONOMETRIC:
        raise ValueError("trig_pb needs a trigonometric slice point")
    df, dh = real_derivatives(f, point), real_derivatives(h, point)
    R = DynamicalR(point.Q, point.tol_reg)
    L = point.L
    if i == 1:
        value = (_im(df.D1, dh.D2) - _im(dh.D1, df.D2)
                 + _im(L, R.bracket(df.D2, dh.D2)))
    elif i == 2:
        A, B = L @ df.D2, L @ dh.D2
        value = _im(df.D1, B) - _im(dh.D1, A) + 2.0 * _im(A, R(B))
    else:
        raise ValueError(f"Bracket index must be 1 or 2, got {i}")
    return -1j * value


def conjugation_identity_check(kind: SliceKind, Q: np.ndarray, X: np.ndarray) -> float:
    """
    ‖R(Q) X^dagger + (R(Q) X)^dagger‖ on the hyperbolic slice and
    ‖R(Q) X^dagger - (R(Q) X)^dagger‖ on the trigonometric one.
    """
    R = DynamicalR(Q)
    lhs = R(X.conj().T)
    rhs = R(X).conj().T
    if kind is SliceKind.HYPERBOLIC:
        return float(np.linalg.norm(lhs + rhs))
    return float(np.linalg.norm(lhs - rhs))


def flow_direction(kind: SliceKind) -> complex:
    """Complex time direction that keeps the slice invariant."""
    return 1.0 if kind is SliceKind.HYPERBOLIC else 1j


def slice_flow(point: SlicePoint, m: int, t_end: float, steps: int,
               observables: Optional[List[Observable]] = None) -> Trajectory:
    """Reduced flow of h_m along the slice-preserving real time direction."""
    z_end = flow_direction(point.kind) * t_end
    return integrate_reduced(point.to_reduced(), m, z_end, steps, observables or ())


def random_slice_point(kind: SliceKind, n: int, rng: np.random.Generator,
                       scale: float = 1.0) -> SlicePoint:
    """Random slice point with positions separated by at least 0.3."""
    if kind is SliceKind.HYPERBOLIC:
        q = np.cumsum(0.3 + 0.7 * rng.random(n)) - 0.5 * n
    else:
        # n points on the circle, each in its own arc of length 2 pi / n
        arc = 2 * np.pi / n
        q = arc * (np.arange(n) + 0.2 + 0.6 * rng.random(n))
    return SlicePoint(kind, q, random_hermitian(rng, n, scale))


def slice_observables(kind: SliceKind) -> List[Observable]:
    """Invariant trace-word observables that are real-valued on the slice."""
    if kind is SliceKind.HYPERBOLIC:
        return [TraceWordObservable(w) for w in ("l", "ll", "gl", "gll", "glGl", "ggl")]
    return [
        TraceWordObservable("l"),
        TraceWordObservable("ll"),
        TraceWordObservable("lll"),
        TraceWordObservable("glGl"),
        TraceWordObservable("gl") + TraceWordObservable("Gl"),
        TraceWordObservable("g") + TraceWordObservable("G"),
    ]
