"""
The Heisenberg double G x G and the transfer of its plus bracket to (g, L).

gl(n) + gl(n) carries the pairing <(X1, X2), (Y1, Y2)>_2 = tr X1 Y1 - tr X2 Y2
and splits into the isotropic diagonal subalgebra {(Y, Y)} and the star
subalgebra {(r_+ Y, r_- Y)}. Near the identity every (g1, g2) factorizes into
diagonal and star group elements; the resulting chart (g, L) pulls the plus
bracket back to the second bracket on G x gl(n, C).
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from ..errors import NotInvertibleError
from ..linalg.core import (
    DET_TOLERANCE,
    ComplexMatrix,
    as_matrix,
    basis_matrix,
    check_same_size,
    mat_exp,
    trace_pairing,
)
from ..linalg.gauss import GaussOrder, gauss_decompose, principal_sqrt_diagonal
from ..poisson.brackets import w_field
from ..poisson.observables import Observable, PhasePoint, default_fd_step
from ..poisson.rmatrix import r_minus, r_plus

logger = logging.getLogger(__name__)

DoubleFunction = Callable[[np.ndarray, np.ndarray], complex]


@dataclass(frozen=True, eq=False)
class DoubleVector:
    """An element (X1, X2) of gl(n) + gl(n)."""

    first: ComplexMatrix
    second: ComplexMatrix

    def __post_init__(self) -> None:
        first = np.asarray(self.first, dtype=np.complex128)
        second = np.asarray(self.second, dtype=np.complex128)
        check_same_size(first, second)
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "second", second)

    def __add__(self, other: "DoubleVector") -> "DoubleVector":
        return DoubleVector(self.first + other.first, self.second + other.second)

    def __sub__(self, other: "DoubleVector") -> "DoubleVector":
        return DoubleVector(self.first - other.first, self.second - other.second)

    def scaled(self, c: complex) -> "DoubleVector":
        return DoubleVector(c * self.first, c * self.second)

    def norm(self) -> float:
        return float(np.hypot(np.linalg.norm(self.first), np.linalg.norm(self.second)))

    @classmethod
    def zero(cls, n: int) -> "DoubleVector":
        Z = np.zeros((n, n), dtype=np.complex128)
        return cls(Z, Z.copy())


def delta(Y: np.ndarray) -> DoubleVector:
    """(Y, Y), an element of the diagonal subalgebra."""
    return DoubleVector(Y, Y)


def star(Y: np.ndarray) -> DoubleVector:
    """(r_+ Y, r_- Y), an element of the star subalgebra."""
    return DoubleVector(r_plus(Y), r_minus(Y))


def pairing2(V: DoubleVector, W: DoubleVector) -> complex:
    """tr(X1 Y1) - tr(X2 Y2)."""
    return trace_pairing(V.first, W.first) - trace_pairing(V.second, W.second)


def project_star(V: DoubleVector) -> DoubleVector:
    """Star component (r_+ Z, r_- Z) with Z = X1 - X2."""
    return star(V.first - V.second)


def project_delta(V: DoubleVector) -> DoubleVector:
    """Diagonal component (Y, Y) with Y = X2 - r_-(X1 - X2)."""
    return delta(V.second - r_minus(V.first - V.second))


def double_r(V: DoubleVector) -> DoubleVector:
    """R = (P_delta - P_star) / 2."""
    return (project_delta(V) - project_star(V)).scaled(0.5)


@dataclass(frozen=True, eq=False)
class DoubleElement:
    """An element (g1, g2) of G x G."""

    g1: ComplexMatrix
    g2: ComplexMatrix

    def __post_init__(self) -> None:
        g1 = as_matrix(self.g1, "g1")
        g2 = as_matrix(self.g2, "g2")
        check_same_size(g1, g2)
        for name, g in (("g1", g1), ("g2", g2)):
            det = np.linalg.det(g)
            if abs(det) <= DET_TOLERANCE:
                raise NotInvertibleError(f"|det {name}| = {abs(det):.3e}")
        object.__setattr__(self, "g1", g1)
        object.__setattr__(self, "g2", g2)

    @property
    def n(self) -> int:
        return self.g1.shape[0]


@dataclass(frozen=True, eq=False)
class DeltaStarFactors:
    """
    Diagonal factor (g, g) and star factor (g_+, g_-) of a double element.

    The star factor is g_+ = g_> g_0 and g_- = (g_0 g_<)^-1 with g_> upper
    unipotent, g_0 invertible diagonal and g_< lower unipotent.
    """

    g: ComplexMatrix
    upper: ComplexMatrix
    g0: ComplexMatrix
    lower: ComplexMatrix

    @property
    def gplus(self) -> ComplexMatrix:
        return self.upper @ self.g0

    @property
    def gminus(self) -> ComplexMatrix:
        return np.linalg.inv(self.g0 @ self.lower)


def _gauss_sqrt(A: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    f = gauss_decompose(A, GaussOrder.UPPER_DIAG_LOWER)
    return f.upper_unipotent, principal_sqrt_diagonal(f.diagonal), f.lower_unipotent


def factorize(d: DoubleElement) -> Tuple[ComplexMatrix, DeltaStarFactors]:
    """
    Split a double element near the identity into its right factors.

    The star factor comes from g1^-1 g2 = h_> h_0^2 h_<. The diagonal factor is
    g = g1^-1 b_> b_0 where g1 g2^-1 = b_> b_0^2 b_<.

    Args:
        d: Element close enough to the identity for both Gauss factorizations

    Returns:
        Tuple (g_deltaR, star factors)

    Raises:
        SingularMinorError: If a Gauss factorization does not exist
        BranchCutError: If a diagonal factor has no principal square root
    """
    g1_inv = np.linalg.inv(d.g1)
    h_up, h0, h_low = _gauss_sqrt(g1_inv @ d.g2)
    b_up, b0, _ = _gauss_sqrt(d.g1 @ np.linalg.inv(d.g2))
    g = g1_inv @ b_up @ b0
    return g, DeltaStarFactors(g=g, upper=h_up, g0=h0, lower=h_low)


def to_cotangent(f: DeltaStarFactors) -> PhasePoint:
    """(g, L) with L = g_> g_0^2 g_<."""
    return PhasePoint(f.g, f.upper @ f.g0 @ f.g0 @ f.lower)


def transfer_point(d: DoubleElement) -> PhasePoint:
    """The chart G x G -> G x gl(n, C) near the identity."""
    return to_cotangent(factorize(d)[1])


def embed_cotangent(p: PhasePoint) -> DoubleElement:
    """
    Inverse of transfer_point near the identity.

    With g^-1 L^-1 g = l d u (lower, diagonal, upper), b_0 = sqrt(d),
    b_< = b_0^-1 l b_0 and b_> = b_0 u b_0^-1, returns g1 = b_> b_0 g^-1
    and g2 = g1 L.
    """
    M = p.g_inv @ np.linalg.inv(p.L) @ p.g
    f = gauss_decompose(M, GaussOrder.LOWER_DIAG_UPPER)
    b0 = principal_sqrt_diagonal(f.diagonal)
    b0_inv = np.linalg.inv(b0)
    b_up = b0 @ f.upper_unipotent @ b0_inv
    g1 = b_up @ b0 @ p.g_inv
    return DoubleElement(g1, g1 @ p.L)


def left_derivative(F: DoubleFunction, d: DoubleElement,
                    h: float = 1e-5) -> DoubleVector:
    """
    Central-difference left derivative DF with
    <DF, (X1, X2)>_2 = d/dt F(e^{t X1} g1, e^{t X2} g2).
    """
    return _fd_double(F, d, h, left=True)


def right_derivative(F: DoubleFunction, d: DoubleElement,
                     h: float = 1e-5) -> DoubleVector:
    """Central-difference right derivative D'F (multiplication on the right)."""
    return _fd_double(F, d, h, left=False)


def _fd_double(F: DoubleFunction, d: DoubleElement, h: float, left: bool) -> DoubleVector:
    n = d.n
    A1 = np.zeros((n, n), dtype=np.complex128)
    A2 = np.zeros_like(A1)

    def act(E: np.ndarray, g: np.ndarray) -> np.ndarray:
        return E @ g if left else g @ E

    for a in range(n):
        for b in range(n):
            T = basis_matrix(n, a, b)
            up, down = mat_exp(h * T), mat_exp(-h * T)
            # Pairing with (T, 0) reads (A1)_ba; with (0, T) it reads -(A2)_ba.
            A1[b, a] = (F(act(up, d.g1), d.g2) - F(act(down, d.g1), d.g2)) / (2 * h)
            A2[b, a] = -(F(d.g1, act(up, d.g2)) - F(d.g1, act(down, d.g2))) / (2 * h)
    return DoubleVector(A1, A2)


def pb_double(sign: int, F: DoubleFunction, H: DoubleFunction, d: DoubleElement,
              h: float = 1e-5) -> complex:
    """
    Plus (sign=+1) or minus (sign=-1) bracket on the double.

    <DF, R DH>_2 +- <D'F, R D'H>_2 with derivatives by finite differences.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    DF, DH = left_derivative(F, d, h), left_derivative(H, d, h)
    DpF, DpH = right_derivative(F, d, h), right_derivative(H, d, h)
    return pairing2(DF, double_r(DH)) + sign * pairing2(DpF, double_r(DpH))


def pullback(F: Observable) -> DoubleFunction:
    """F composed with the chart transfer_point."""

    def pulled(g1: np.ndarray, g2: np.ndarray) -> complex:
        return F.evaluate(transfer_point(DoubleElement(g1, g2)))

    return pulled


def transferred_pb_plus(F: Observable, H: Observable, f: DeltaStarFactors) -> complex:
    """
    Plus bracket of pullbacks, written through the (g, L) derivatives.

    <nabla2 F - nabla2' F, W_H> - <Ad_(g,g) star(nabla1' F), star(nabla1 H)>_2
    + <nabla1 F, W_H> - <nabla1 H, W_F>, where W = r_+ nabla2' - r_- nabla2.
    """
    p = to_cotangent(f)
    bF, bH = F.derivatives(p), H.derivatives(p)
    w_F = w_field(bF.nabla2, bF.nabla2p)
    w_H = w_field(bH.nabla2, bH.nabla2p)
    s = star(bF.nabla1p)
    adjoint = DoubleVector(p.g @ s.first @ p.g_inv, p.g @ s.second @ p.g_inv)
    return (trace_pairing(bF.nabla2 - bF.nabla2p, w_H)
            - pairing2(adjoint, star(bH.nabla1))
            + trace_pairing(bF.nabla1, w_H)
            - trace_pairing(bH.nabla1, w_F))


def factor_derivative_residuals(F: Observable, f: DeltaStarFactors,
                      h: Optional[float] = None) -> List[float]:
    """
    Derivatives of F(g, g_+ g_-^-1) with respect to the diagonal and star
    factors, compared with their expressions through nabla F at (g, L).

    Returns:
        Residual norms, in order: left and right derivatives along the
        diagonal factor, then left and right derivatives along the star
        factor (the last one compared after projecting onto the star part)
    """
    p = to_cotangent(f)
    n = p.n
    step = default_fd_step(p) if h is None else h
    b = F.derivatives(p)
    gplus, gminus = f.gplus, f.gminus
    gminus_inv = np.linalg.inv(gminus)

    def value(g: np.ndarray, L: np.ndarray) -> complex:
        return F.evaluate(PhasePoint(g, L))

    def central(func: Callable[[float], complex]) -> complex:
        return (func(step) - func(-step)) / (2 * step)

    Y_left = np.zeros((n, n), dtype=np.complex128)
    Y_right = np.zeros_like(Y_left)
    W_left = np.zeros_like(Y_left)
    W_right = np.zeros_like(Y_left)
    for a in range(n):
        for c in range(n):
            T = basis_matrix(n, a, c)
            Tp, Tm = r_plus(T), r_minus(T)
            Y_left[c, a] = central(lambda z: value(mat_exp(z * T) @ p.g, p.L))
            Y_right[c, a] = central(lambda z: value(p.g @ mat_exp(z * T), p.L))
            W_left[c, a] = central(lambda z: value(
                p.g, mat_exp(z * Tp) @ p.L @ mat_exp(-z * Tm)))
            W_right[c, a] = central(lambda z: value(
                p.g, gplus @ mat_exp(z * Tp) @ mat_exp(-z * Tm) @ gminus_inv))

    res_left = (star(Y_left) - star(b.nabla1)).norm()
    res_right = (star(Y_right) - star(b.nabla1p)).norm()
    res_star = (delta(W_left) - delta(w_field(b.nabla2, b.nabla2p))).norm()
    moved = DoubleVector(gplus @ W_right @ np.linalg.inv(gplus),
                         gminus @ W_right @ gminus_inv)
    res_star_right = (project_star(moved)
                      - project_star(DoubleVector(b.nabla2, b.nabla2p))).norm()
    return [res_left, res_right, res_star, res_star_right]
