"""
Observables on the phase space G x gl(n, C) and their derivative oracles.

Every observable can be evaluated at a PhasePoint and returns a
DerivativeBundle (nabla_1 F, nabla_1' F, d_2 F). The built-in family is
closed under complex-linear combinations, products and the W-derivative
(the field (g, L) -> (g, L + z I)), so all bracket identities can be tested
with exact analytic gradients. Arbitrary callables are supported through
central finite differences.
"""

import itertools
import logging
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, reduce
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import NotInvertibleError
from ..linalg.core import (
    DET_TOLERANCE,
    ComplexMatrix,
    as_matrix,
    basis_matrix,
    check_same_size,
    mat_exp,
    random_near_identity,
)

logger = logging.getLogger(__name__)

Scalar = Union[int, float, complex]

WORD_ALPHABET = "gGl"
MAX_FD_STEP = 1e-2
EXTRAPOLATED_FD_STEP = 1e-3


@dataclass(frozen=True, eq=False)
class PhasePoint:
    """A point (g, L) of G x gl(n, C)."""

    g: ComplexMatrix
    L: ComplexMatrix

    def __post_init__(self) -> None:
        g = as_matrix(self.g, "g")
        L = as_matrix(self.L, "L")
        check_same_size(g, L)
        det = np.linalg.det(g)
        if abs(det) <= DET_TOLERANCE:
            raise NotInvertibleError(f"|det g| = {abs(det):.3e}")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "L", L)

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @cached_property
    def g_inv(self) -> ComplexMatrix:
        return np.linalg.inv(self.g)

    def norm(self) -> float:
        return float(np.hypot(np.linalg.norm(self.g), np.linalg.norm(self.L)))

    def conjugate(self, eta: np.ndarray) -> "PhasePoint":
        """The point (eta g eta^-1, eta L eta^-1)."""
        eta_inv = np.linalg.inv(eta)
        return PhasePoint(eta @ self.g @ eta_inv, eta @ self.L @ eta_inv)


@dataclass(frozen=True, eq=False)
class DerivativeBundle:
    """
    Values of nabla_1 F, nabla_1' F and d_2 F at a point with Lie-algebra part L.

    nabla_2 F = L d_2 F and nabla_2' F = d_2 F L are derived.
    """

    nabla1: ComplexMatrix
    nabla1p: ComplexMatrix
    d2: ComplexMatrix
    L: ComplexMatrix

    @property
    def nabla2(self) -> ComplexMatrix:
        return self.L @ self.d2

    @property
    def nabla2p(self) -> ComplexMatrix:
        return self.d2 @ self.L

    @classmethod
    def zero(cls, L: np.ndarray) -> "DerivativeBundle":
        Z = np.zeros_like(L, dtype=np.complex128)
        return cls(Z, Z.copy(), Z.copy(), L)

    def __add__(self, other: "DerivativeBundle") -> "DerivativeBundle":
        return DerivativeBundle(self.nabla1 + other.nabla1,
                                self.nabla1p + other.nabla1p,
                                self.d2 + other.d2, self.L)

    def scaled(self, c: Scalar) -> "DerivativeBundle":
        return DerivativeBundle(c * self.nabla1, c * self.nabla1p, c * self.d2, self.L)

    def distance(self, other: "DerivativeBundle") -> float:
        """Largest Frobenius distance among the three gradients."""
        return max(float(np.linalg.norm(self.nabla1 - other.nabla1)),
                   float(np.linalg.norm(self.nabla1p - other.nabla1p)),
                   float(np.linalg.norm(self.d2 - other.d2)))

    def magnitude(self) -> float:
        return max(float(np.linalg.norm(self.nabla1)),
                   float(np.linalg.norm(self.nabla1p)),
                   float(np.linalg.norm(self.d2)))


class Observable(ABC):
    """Holomorphic function on phase space with a derivative oracle."""

    @abstractmethod
    def evaluate(self, p: PhasePoint) -> complex:
        """Value of the observable at p."""

    @abstractmethod
    def derivatives(self, p: PhasePoint) -> DerivativeBundle:
        """Analytic derivative bundle at p."""

    @abstractmethod
    def w_derivative(self) -> "Observable":
        """The observable W[F](g, L) = d/dz F(g, L + z I) at z = 0."""

    @property
    def invariant(self) -> bool:
        """Whether the observable is invariant under simultaneous conjugation."""
        return False

    @property
    def label(self) -> str:
        return type(self).__name__

    def __call__(self, p: PhasePoint) -> complex:
        return self.evaluate(p)

    def __add__(self, other: Union["Observable", Scalar]) -> "Observable":
        operand = _as_observable(other)
        if operand is None:
            return NotImplemented
        return LinearCombination(((1.0, self), (1.0, operand)))

    def __radd__(self, other: Scalar) -> "Observable":
        return self.__add__(other)

    def __sub__(self, other: Union["Observable", Scalar]) -> "Observable":
        operand = _as_observable(other)
        if operand is None:
            return NotImplemented
        return LinearCombination(((1.0, self), (-1.0, operand)))

    def __rsub__(self, other: Scalar) -> "Observable":
        operand = _as_observable(other)
        if operand is None:
            return NotImplemented
        return LinearCombination(((1.0, operand), (-1.0, self)))

    def __neg__(self) -> "Observable":
        return LinearCombination(((-1.0, self),))

    def __mul__(self, other: Union["Observable", Scalar]) -> "Observable":
        if isinstance(other, Observable):
            return ProductObservable((self, other))
        if not isinstance(other, (int, float, complex)):
            return NotImplemented
        return LinearCombination(((complex(other), self),))

    def __rmul__(self, other: Scalar) -> "Observable":
        if not isinstance(other, (int, float, complex)):
            return NotImplemented
        return LinearCombination(((complex(other), self),))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.label}>"


class ConstantObservable(Observable):
    """A constant function."""

    def __init__(self, value: Scalar):
        self.value = complex(value)

    def evaluate(self, p: PhasePoint) -> complex:
        return self.value

    def derivatives(self, p: PhasePoint) -> DerivativeBundle:
        return DerivativeBundle.zero(p.L)

    def w_derivative(self) -> Observable:
        return ConstantObservable(0.0)

    @property
    def invariant(self) -> bool:
        return True

    @property
    def label(self) -> str:
        return f"{self.value}"


def _as_observable(value: object) -> Optional["Observable"]:
    """Observables pass through, scalars become constants, anything else gives None."""
    if isinstance(value, Observable):
        return value
    if isinstance(value, (int, float, complex)):
        return ConstantObservable(value)
    return None


class DimensionObservable(Observable):
    """coefficient * tr(identity) = coefficient * n; arises from W-derivatives of words."""

    def __init__(self, coefficient: Scalar = 1.0):
        self.coefficient = complex(coefficient)

    def evaluate(self, p: PhasePoint) -> complex:
        return self.coefficient * p.n

    def derivatives(self, p: PhasePoint) -> DerivativeBundle:
        return DerivativeBundle.zero(p.L)

    def w_derivative(self) -> Observable:
        return ConstantObservable(0.0)

    @property
    def invariant(self) -> bool:
        return True

    @property
    def label(self) -> str:
        return f"{self.coefficient}*n"


class CoordinateKind(Enum):
    G_ENTRY = "g"
    L_ENTRY = "L"


class CoordinateObservable(Observable):
    """
    Matrix-element evaluation functions g_ij and L_kl (0-based indices).

    L_kl is paired with the dual basis element e_lk, so d_2 L_kl = e_lk.
    """

    def __init__(self, kind: CoordinateKind, i: int, j: int):
        if i < 0 or j < 0:
            raise ValueError(f"Indices must be non-negative, got ({i}, {j})")
        self.kind = kind
        self.i = i
        self.j = j

    def _check_range(self, n: int) -> None:
        if self.i >= n or self.j >= n:
            raise ValueError(f"{self.label} is out of range for n={n}")

    def evaluate(self, p: PhasePoint) -> complex:
        self._check_range(p.n)
        source = p.g if self.kind is CoordinateKind.G_ENTRY else p.L
        return complex(source[self.i, self.j])

    def derivatives(self, p: PhasePoint) -> DerivativeBundle:
        self._check_range(p.n)
        E = basis_matrix(p.n, self.j, self.i)
        if self.kind is CoordinateKind.G_ENTRY:
            Z = np.zeros_like(E)
            return DerivativeBundle(p.g @ E, E @ p.g, Z, p.L)
        bundle = DerivativeBundle.zero(p.L)
        return DerivativeBundle(bundle.nabla1, bundle.nabla1p, E, p.L)

    def w_derivative(self) -> Observable:
        if self.kind is CoordinateKind.L_ENTRY and self.i == self.j:
            return ConstantObservable(1.0)
        return ConstantObservable(0.0)

    @property
    def label(self) -> str:
        return f"{self.kind.value}[{self.i + 1},{self.j + 1}]"


def g_entry(i: int, j: int) -> CoordinateObservable:
    return CoordinateObservable(CoordinateKind.G_ENTRY, i, j)


def l_entry(k: int, l: int) -> CoordinateObservable:
    return CoordinateObservable(CoordinateKind.L_ENTRY, k, l)


class TraceWordObservable(Observable):
    """
    coefficient * tr(X_1 ... X_k) with X_i in {g, g^-1, L}.

    The word is a string over "g" (g), "G" (g^-1) and "l" (L); for example
    "glGl" is tr(g L g^-1 L).
    """

    def __init__(self, word: str, coefficient: Scalar = 1.0):
        if not word:
            raise ValueError("Trace word must be non-empty")
        bad = set(word) - set(WORD_ALPHABET)
        if bad:
            raise ValueError(f"Trace word {word!r} has letters outside {WORD_ALPHABET!r}: {sorted(bad)}")
        self.word = word
        self.coefficient = complex(coefficient)

    def _slots(self, p: PhasePoint) -> List[np.ndarray]:
        lookup = {"g": p.g, "l": p.L}
        if "G" in self.word:
            lookup["G"] = p.g_inv
        return [lookup[ch] for ch in self.word]

    @staticmethod
    def _product(mats: Sequence[np.ndarray], n: int) -> np.ndarray:
        return reduce(np.matmul, mats, np.eye(n, dtype=np.complex128))

    def evaluate(self, p: PhasePoint) -> complex:
        return self.coefficient * complex(np.trace(self._product(self._slots(p), p.n)))

    def derivatives(self, p: PhasePoint) -> DerivativeBundle:
        mats = self._slots(p)
        n = p.n
        nabla1 = np.zeros((n, n), dtype=np.complex128)
        nabla1p = np.zeros_like(nabla1)
        d2 = np.zeros_like(nabla1)
        for i, ch in enumerate(self.word):
            # Product of the remaining factors, read cyclically after slot i.
            rotated = self._product(mats[i + 1:] + mats[:i], n)
            if ch == "l":
                d2 += rotated
            elif ch == "g":
                nabla1 += p.g @ rotated
                nabla1p += rotated @ p.g
            else:
                nabla1 -= rotated @ p.g_inv
                nabla1p -= p.g_inv @ rotated
        c = self.coefficient
        return DerivativeBundle(c * nabla1, c * nabla1p, c * d2, p.L)

    def w_derivative(self) -> Observable:
        terms: List[Tuple[complex, Observable]] = []
        for i, ch in enumerate(self.word):
            if ch != "l":
                continue
            rest = self.word[i + 1:] + self.word[:i]
            term = TraceWordObservable(rest) if rest else DimensionObservable()
            terms.append((self.coefficient, term))
        if not terms:
            return ConstantObservable(0.0)
        return LinearCombination(tuple(terms))

    @property
    def invariant(self) -> bool:
        return True

    @property
    def label(self) -> str:
        if self.coefficient == 1:
            return self.word
        return f"{self.coefficient}*{self.word}"


class LinearCombination(Observable):
    """Sum of c_i * F_i."""

    def __init__(self, terms: Sequence[Tuple[Scalar, Observable]]):
        if not terms:
            raise ValueError("LinearCombination needs at least one term")
        self.terms: Tuple[Tuple[complex, Observable], ...] = tuple(
            (complex(c), F) for c, F in terms
        )

    def evaluate(self, p: PhasePoint) -> complex:
        return sum((c * F.evaluate(p) for c, F in self.terms), 0j)

    def derivatives(self, p: PhasePoint) -> DerivativeBundle:
        total = DerivativeBundle.zero(p.L)
        for c, F in self.terms:
            total = total + F.derivatives(p).scaled(c)
        return total

    def w_derivative(self) -> Observable:
        return LinearCombination(tuple((c, F.w_derivative()) for c, F in self.terms))

    @property
    def invariant(self) -> bool:
        return all(F.invariant for _, F in self.terms)

    @property
    def label(self) -> str:
        return " + ".join(f"{c}*({F.label})" for c, F in self.terms)


class ProductObservable(Observable):
    """Pointwise product F_1 * ... * F_k."""

    def __init__(self, factors: Sequence[Observable]):
        if not factors:
            raise ValueError("ProductObservable needs at least one factor")
        self.factors = tuple(factors)

    def evaluate(self, p: PhasePoint) -> complex:
        value = 1 + 0j
        for F in self.factors:
            value *= F.evaluate(p)
        return value

    def derivatives(self, p: PhasePoint) -> DerivativeBundle:
        values = [F.evaluate(p) for F in self.factors]
        total = DerivativeBundle.zero(p.L)
        for i, F in enumerate(self.factors):
            others = np.prod([v for j, v in enumerate(values) if j != i]) if len(values) > 1 else 1.0
            total = total + F.derivatives(p).scaled(complex(others))
        return total

    def w_derivative(self) -> Observable:
        terms: List[Tuple[complex, Observable]] = []
        for i, F in enumerate(self.factors):
            others = self.factors[:i] + self.factors[i + 1:]
            pieces = (F.w_derivative(),) + others
            terms.append((1.0, ProductObservable(pieces)))
        return LinearCombination(tuple(terms))

    @property
    def invariant(self) -> bool:
        return all(F.invariant for F in self.factors)

    @property
    def label(self) -> str:
        return " * ".join(f"({F.label})" for F in self.factors)


class CallableObservable(Observable):
    """
    Wraps an arbitrary holomorphic function f(g, L).

    Derivatives come from central differences with the given step, or from
    their Richardson extrapolation when extrapolate is set.
    """

    def __init__(self, func: Callable[[np.ndarray, np.ndarray], complex],
                 name: str = "callable", invariant: bool = False,
                 fd_step: Optional[float] = None, extrapolate: bool = False):
        self.func = func
        self.name = name
        self._invariant = invariant
        self.fd_step = fd_step
        self.extrapolate = extrapolate

    def evaluate(self, p: PhasePoint) -> complex:
        return complex(self.func(p.g, p.L))

    def derivatives(self, p: PhasePoint) -> DerivativeBundle:
        if self.extrapolate:
            return extrapolated_fd_derivatives(self, p, self.fd_step or EXTRAPOLATED_FD_STEP)
        return fd_derivatives(self, p, self.fd_step)

    def w_derivative(self) -> Observable:
        h = self.fd_step or 1e-5
        func = self.func

        def shifted(g: np.ndarray, L: np.ndarray) -> complex:
            I = np.eye(L.shape[0])
            return (func(g, L + h * I) - func(g, L - h * I)) / (2 * h)

        return CallableObservable(shifted, f"W[{self.name}]", self._invariant, self.fd_step,
                                  self.extrapolate)

    @property
    def invariant(self) -> bool:
        return self._invariant

    @property
    def label(self) -> str:
        return self.name


def default_fd_step(p: PhasePoint) -> float:
    """Step 1e-5 scaled by (1 + ||p||)."""
    return 1e-5 * (1.0 + p.norm())


def fd_derivatives(F: Observable, p: PhasePoint,
                   h: Optional[float] = None) -> DerivativeBundle:
    """
    Central finite-difference derivative bundle.

    nabla_1 from F(e^{+-hT} g, L), nabla_1' from F(g e^{+-hT}, L) and d_2 from
    F(g, L +- hT) along every elementary matrix T = e_ab. The pairing
    <nabla F, e_ab> equals the (b, a) entry of nabla F.

    Args:
        F: Observable to differentiate
        p: Point
        h: Step in (0, 1e-2]; defaults to 1e-5 * (1 + ||p||)

    Returns:
        DerivativeBundle accurate to O(h^2)
    """
    if h is None:
        h = default_fd_step(p)
    if not 0.0 < h <= MAX_FD_STEP:
        raise ValueError(f"FD step must lie in (0, {MAX_FD_STEP}], got {h}")
    n = p.n
    nabla1 = np.zeros((n, n), dtype=np.complex128)
    nabla1p = np.zeros_like(nabla1)
    d2 = np.zeros_like(nabla1)
    for a in range(n):
        for b in range(n):
            T = basis_matrix(n, a, b)
            up, down = mat_exp(h * T), mat_exp(-h * T)
            nabla1[b, a] = (F.evaluate(PhasePoint(up @ p.g, p.L))
                            - F.evaluate(PhasePoint(down @ p.g, p.L))) / (2 * h)
            nabla1p[b, a] = (F.evaluate(PhasePoint(p.g @ up, p.L))
                             - F.evaluate(PhasePoint(p.g @ down, p.L))) / (2 * h)
            d2[b, a] = (F.evaluate(PhasePoint(p.g, p.L + h * T))
                        - F.evaluate(PhasePoint(p.g, p.L - h * T))) / (2 * h)
    return DerivativeBundle(nabla1, nabla1p, d2, p.L)


def extrapolated_fd_derivatives(F: Observable, p: PhasePoint,
                                h: float = EXTRAPOLATED_FD_STEP) -> DerivativeBundle:
    """
    Richardson extrapolation (4 D(h/2) - D(h)) / 3 of the central differences.

    Accurate to O(h^4).
    """
    coarse = fd_derivatives(F, p, h)
    fine = fd_derivatives(F, p, 0.5 * h)
    return fine.scaled(4.0 / 3.0) + coarse.scaled(-1.0 / 3.0)


def analytic_derivatives(F: Observable, p: PhasePoint) -> DerivativeBundle:
    return F.derivatives(p)


def evaluate(F: Observable, p: PhasePoint) -> complex:
    return F.evaluate(p)


def check_invariance(F: Observable, p: PhasePoint, trials: int = 10,
                     seed: int = 0, radius: float = 0.3) -> float:
    """
    Largest change of F under random simultaneous conjugations near the identity.

    Args:
        F: Observable
        p: Base point
        trials: Number of random conjugations
        seed: RNG seed
        radius: Distance of eta from the identity

    Returns:
        max |F(eta g eta^-1, eta L eta^-1) - F(g, L)|
    """
    rng = np.random.default_rng(seed)
    base = F.evaluate(p)
    worst = 0.0
    for _ in range(trials):
        eta = random_near_identity(rng, p.n, radius)
        worst = max(worst, abs(F.evaluate(p.conjugate(eta)) - base))
    return worst


def invariant_identity_check(F: Observable, p: PhasePoint) -> float:
    """‖nabla_1' F - (nabla_1 F + nabla_2 F - nabla_2' F)‖ for invariant F."""
    b = F.derivatives(p)
    return float(np.linalg.norm(b.nabla1p - (b.nabla1 + b.nabla2 - b.nabla2p)))


def free_hamiltonian_observable(m: int) -> TraceWordObservable:
    """H_m = tr(L^m) / m."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return TraceWordObservable("l" * m, 1.0 / m)


def trace_words(max_length: int) -> List[str]:
    """
    All trace words up to max_length, one per class of cyclic rotations.

    Rotations give the same trace, so each class is represented by its
    lexicographically smallest rotation.

    Args:
        max_length: Longest word length, at least 1

    Returns:
        Words ordered by length, then lexicographically
    """
    if max_length < 1:
        raise ValueError(f"max_length must be >= 1, got {max_length}")
    words = []
    for k in range(1, max_length + 1):
        for letters in itertools.product(sorted(WORD_ALPHABET), repeat=k):
            word = "".join(letters)
            if word == min(word[i:] + word[:i] for i in range(k)):
                words.append(word)
    return words


_COORDINATE = re.compile(r"^(g|L)\[(\d+),(\d+)\]$")


def parse_observable(text: str) -> Observable:
    """
    Parse an observable from its command-line form.

    Accepted forms are trace words ("glGl"), trace words with a coefficient
    ("0.5*ll") and 1-based coordinates ("g[1,2]", "L[2,1]").
    """
    text = text.strip().replace(" ", "")
    match = _COORDINATE.match(text)
    if match:
        kind = CoordinateKind(match.group(1))
        i, j = int(match.group(2)) - 1, int(match.group(3)) - 1
        return CoordinateObservable(kind, i, j)
    coefficient: complex = 1.0
    word = text
    if "*" in text:
        head, word = text.rsplit("*", 1)
        try:
            coefficient = complex(head)
        except ValueError as e:
            raise ValueError(f"Bad coefficient {head!r} in {text!r}") from e
    return TraceWordObservable(word, coefficient)
