"""
The two holomorphic Poisson brackets on G x gl(n, C) and derived operations.

The first bracket is the canonical cotangent bracket in the trivialization
(g, L); the second is built from the constant r-matrix. Both are evaluated
from the derivative bundles supplied by the observables module.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from ..errors import InvarianceViolatedError
from ..linalg.core import ComplexMatrix, commutator, trace_pairing
from .observables import DerivativeBundle, Observable, PhasePoint, check_invariance
from .rmatrix import r_const, r_minus, r_plus

logger = logging.getLogger(__name__)

# (nabla1, nabla1', nabla2, nabla2') of one observable
Gradients = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


class BracketTag(Enum):
    PB1 = "PB1"
    PB2 = "PB2"
    PB2_INVARIANT = "PB2_INVARIANT"
    PENCIL = "PENCIL"
    LIE_DERIVATIVE_W = "LIE_DERIVATIVE_W"


@dataclass(frozen=True)
class BracketKind:
    """
    Which bracket to evaluate; PENCIL carries the coefficients of x PB1 + y PB2.

    Attributes:
        tag: Bracket family
        x: Coefficient of the first bracket (PENCIL only)
        y: Coefficient of the second bracket (PENCIL only)
    """

    tag: BracketTag
    x: complex = 0j
    y: complex = 0j

    def __post_init__(self) -> None:
        for name in ("x", "y"):
            value = complex(getattr(self, name))
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise ValueError(f"Pencil coefficient {name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def pencil(cls, x: complex, y: complex) -> "BracketKind":
        return cls(BracketTag.PENCIL, x, y)

    @property
    def label(self) -> str:
        if self.tag is BracketTag.PENCIL:
            return f"PENCIL({self.x},{self.y})"
        return self.tag.value


PB1 = BracketKind(BracketTag.PB1)
PB2 = BracketKind(BracketTag.PB2)
PB2_INVARIANT = BracketKind(BracketTag.PB2_INVARIANT)
LIE_DERIVATIVE_W = BracketKind(BracketTag.LIE_DERIVATIVE_W)


def _gradients(b: DerivativeBundle) -> Gradients:
    return b.nabla1, b.nabla1p, b.nabla2, b.nabla2p


def w_field(a2: np.ndarray, a2p: np.ndarray) -> ComplexMatrix:
    # r_+ nabla2' - r_- nabla2
    return r_plus(a2p) - r_minus(a2)


def pb2_from_gradients(a: Gradients, b: Gradients) -> complex:
    """Second bracket as a bilinear form in the gradient tuples of F and H."""
    a1, a1p, a2, a2p = a
    b1, b1p, b2, b2p = b
    w_a = w_field(a2, a2p)
    w_b = w_field(b2, b2p)
    return (trace_pairing(r_const(a1), b1)
            - trace_pairing(r_const(a1p), b1p)
            + trace_pairing(a2 - a2p, w_b)
            + trace_pairing(a1, w_b)
            - trace_pairing(b1, w_a))


def pb1(F: Observable, H: Observable, p: PhasePoint) -> complex:
    """
    First Poisson bracket <nabla1 F, d2 H> - <nabla1 H, d2 F> + <L, [d2 F, d2 H]>.

    Args:
        F: First observable
        H: Second observable
        p: Point of evaluation

    Returns:
        Bracket value
    """
    bF, bH = F.derivatives(p), H.derivatives(p)
    return (trace_pairing(bF.nabla1, bH.d2)
            - trace_pairing(bH.nabla1, bF.d2)
            + trace_pairing(p.L, commutator(bF.d2, bH.d2)))


def pb2(F: Observable, H: Observable, p: PhasePoint) -> complex:
    """
    Second Poisson bracket built from the constant r-matrix.

    Args:
        F: First observable
        H: Second observable
        p: Point of evaluation

    Returns:
        Bracket value
    """
    return pb2_from_gradients(_gradients(F.derivatives(p)), _gradients(H.derivatives(p)))


def pb2_invariant(F: Observable, H: Observable, p: PhasePoint,
                  check: bool = False, check_tol: float = 1e-8) -> complex:
    """
    Simplified second bracket valid for conjugation-invariant observables.

    Args:
        F: Invariant observable
        H: Invariant observable
        p: Point of evaluation
        check: Verify invariance numerically before evaluating
        check_tol: Allowed deviation, relative to 1 + |F(p)|

    Raises:
        InvarianceViolatedError: If check is set and F or H is not invariant
    """
    if check:
        for obs in (F, H):
            deviation = check_invariance(obs, p, trials=3)
            if deviation > check_tol * (1.0 + abs(obs.evaluate(p))):
                raise InvarianceViolatedError(
                    f"{obs.label} changes by {deviation:.3e} under conjugation"
                )
    bF, bH = F.derivatives(p), H.derivatives(p)
    return 0.5 * (trace_pairing(bF.nabla1, bH.nabla2 + bH.nabla2p)
                  - trace_pairing(bH.nabla1, bF.nabla2 + bF.nabla2p)
                  + trace_pairing(bF.nabla2, bH.nabla2p)
                  - trace_pairing(bH.nabla2, bF.nabla2p))


def pencil(x: complex, y: complex, F: Observable, H: Observable, p: PhasePoint) -> complex:
    """x {F, H}_1 + y {F, H}_2."""
    return x * pb1(F, H, p) + y * pb2(F, H, p)


def _shifted_gradients(F: Observable, p: PhasePoint) -> Gradients:
    # d/dz of (nabla1, nabla1', L d2, d2 L) at (g, L + zI), z = 0
    bW = F.w_derivative().derivatives(p)
    d2 = F.derivatives(p).d2
    return bW.nabla1, bW.nabla1p, bW.nabla2 + d2, bW.nabla2p + d2


def w_derivative_of_pb2(F: Observable, H: Observable, p: PhasePoint) -> complex:
    """W[{F, H}_2] at p by the chain rule through the gradient tuples."""
    gF = _gradients(F.derivatives(p))
    gH = _gradients(H.derivatives(p))
    return (pb2_from_gradients(_shifted_gradients(F, p), gH)
            + pb2_from_gradients(gF, _shifted_gradients(H, p)))


def lie_derivative_bracket(F: Observable, H: Observable, p: PhasePoint) -> complex:
    """
    W[{F, H}_2] - {W[F], H}_2 - {F, W[H]}_2 for the field W(g, L) = (0, I).

    The second bracket's Lie derivative along W is the first bracket, so the
    result equals pb1(F, H, p).
    """
    return (w_derivative_of_pb2(F, H, p)
            - pb2(F.w_derivative(), H, p)
            - pb2(F, H.w_derivative(), p))


def evaluate_bracket(kind: BracketKind, F: Observable, H: Observable,
                     p: PhasePoint) -> complex:
    """Dispatch on the bracket kind."""
    if kind.tag is BracketTag.PB1:
        return pb1(F, H, p)
    if kind.tag is BracketTag.PB2:
        return pb2(F, H, p)
    if kind.tag is BracketTag.PB2_INVARIANT:
        return pb2_invariant(F, H, p)
    if kind.tag is BracketTag.PENCIL:
        return pencil(kind.x, kind.y, F, H, p)
    return lie_derivative_bracket(F, H, p)


def hamiltonian_vector_field(kind: BracketKind, H: Observable,
                             p: PhasePoint) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """
    Hamiltonian vector field (g dot, L dot) of H with respect to PB1 or PB2.

    The field satisfies <nabla1 F, gdot g^-1> + <d2 F, Ldot> = {F, H} for
    every observable F.

    Raises:
        ValueError: If kind is neither PB1 nor PB2
    """
    b = H.derivatives(p)
    if kind.tag is BracketTag.PB1:
        gdot = b.d2 @ p.g
        Ldot = commutator(b.d2, p.L) - b.nabla1
        return gdot, Ldot
    if kind.tag is BracketTag.PB2:
        w = w_field(b.nabla2, b.nabla2p)
        gdot = w @ p.g - r_const(b.nabla1) @ p.g + p.g @ r_const(b.nabla1p)
        Ldot = commutator(w, p.L) + p.L @ r_minus(b.nabla1) - r_plus(b.nabla1) @ p.L
        return gdot, Ldot
    raise ValueError(f"Vector fields are defined for PB1 and PB2, got {kind.label}")


def vector_field_action(F: Observable, gdot: np.ndarray, Ldot: np.ndarray,
                        p: PhasePoint) -> complex:
    """Derivative of F along the tangent vector (gdot, Ldot) at p."""
    b = F.derivatives(p)
    return trace_pairing(b.nabla1, gdot @ p.g_inv) + trace_pairing(b.d2, Ldot)


def w_flow(p: PhasePoint, z: complex) -> PhasePoint:
    """Integral curve (g, L + z I) of W."""
    return PhasePoint(p.g, p.L + z * np.eye(p.n))
