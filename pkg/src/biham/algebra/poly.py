"""
Exact polynomial Poisson algebra in the coordinate generators g_ij and L_kl.

Generators are numbered g_ij -> i*n + j and L_kl -> n^2 + k*n + l (0-based).
Two further variables x -> 2n^2 and y -> 2n^2 + 1 carry the pencil
coefficients; they are Poisson-central. Coefficients are GaussianRational, so
a Jacobi residual that cancels is the zero polynomial, not a small number.
"""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..poisson.brackets import BracketTag
from .gaussian import HALF, ONE, ZERO, GaussianLike, GaussianRational

logger = logging.getLogger(__name__)

# Sorted tuple of (variable, exponent) pairs, exponents positive.
Monomial = Tuple[Tuple[int, int], ...]

UNIT: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    powers: Dict[int, int] = dict(a)
    for var, exp in b:
        powers[var] = powers.get(var, 0) + exp
    return tuple(sorted(powers.items()))


class Poly:
    """
    Sparse multivariate polynomial with GaussianRational coefficients.

    Zero coefficients are never stored, so two polynomials are equal exactly
    when their term dictionaries are.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, GaussianLike]] = None):
        self.terms: Dict[Monomial, GaussianRational] = {}
        for mono, coef in (terms or {}).items():
            c = GaussianRational.of(coef)
            if c:
                self.terms[mono] = c

    @classmethod
    def constant(cls, value: GaussianLike) -> "Poly":
        return cls({UNIT: value})

    @classmethod
    def variable(cls, var: int) -> "Poly":
        return cls({((var, 1),): ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> List[int]:
        return sorted({var for mono in self.terms for var, _ in mono})

    def _accumulate(self, into: Dict[Monomial, GaussianRational],
                    mono: Monomial, coef: GaussianRational) -> None:
        total = into.get(mono, ZERO) + coef
        if total:
            into[mono] = total
        else:
            into.pop(mono, None)

    def __add__(self, other: "Poly | GaussianLike") -> "Poly":
        other = _as_poly(other)
        result = dict(self.terms)
        for mono, coef in other.terms.items():
            self._accumulate(result, mono, coef)
        return Poly(result)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({mono: -coef for mono, coef in self.terms.items()})

    def __sub__(self, other: "Poly | GaussianLike") -> "Poly":
        return self + (-_as_poly(other))

    def __rsub__(self, other: GaussianLike) -> "Poly":
        return _as_poly(other) - self

    def __mul__(self, other: "Poly | GaussianLike") -> "Poly":
        other = _as_poly(other)
        result: Dict[Monomial, GaussianRational] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                self._accumulate(result, _mono_mul(m1, m2), c1 * c2)
        return Poly(result)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise ValueError(f"Negative exponent {exponent}")
        result = Poly.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, float, complex, GaussianRational)):
            return self.terms == Poly.constant(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def derivative(self, var: int) -> "Poly":
        """Partial derivative with respect to one variable."""
        result: Dict[Monomial, GaussianRational] = {}
        for mono, coef in self.terms.items():
            powers = dict(mono)
            exp = powers.get(var, 0)
            if exp == 0:
                continue
            if exp == 1:
                del powers[var]
            else:
                powers[var] = exp - 1
            self._accumulate(result, tuple(sorted(powers.items())), coef * exp)
        return Poly(result)

    def evaluate(self, values: Mapping[int, GaussianLike]) -> GaussianRational:
        """Exact value at a point given as variable -> value."""
        total = ZERO
        for mono, coef in self.terms.items():
            term = coef
            for var, exp in mono:
                base = GaussianRational.of(values[var])
                for _ in range(exp):
                    term = term * base
            total = total + term
        return total

    def evaluate_complex(self, values: Mapping[int, complex]) -> complex:
        """Floating-point value at a point."""
        total = 0j
        for mono, coef in self.terms.items():
            term = complex(coef)
            for var, exp in mono:
                term *= complex(values[var]) ** exp
            total += term
        return total

    def to_string(self, n: int) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms):
            factors = "*".join(
                generator_label(n, var) + (f"^{exp}" if exp > 1 else "")
                for var, exp in mono
            )
            coef = str(self.terms[mono])
            parts.append(f"{coef}*{factors}" if factors else coef)
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Poly({len(self.terms)} terms)"


def _as_poly(value: "Poly | GaussianLike") -> Poly:
    return value if isinstance(value, Poly) else Poly.constant(value)


def g_index(n: int, i: int, j: int) -> int:
    return i * n + j


def l_index(n: int, k: int, l: int) -> int:
    return n * n + k * n + l


def x_index(n: int) -> int:
    return 2 * n * n


def y_index(n: int) -> int:
    return 2 * n * n + 1


def generator_count(n: int) -> int:
    """Number of coordinate generators, pencil parameters excluded."""
    return 2 * n * n


def decode_generator(n: int, var: int) -> Tuple[str, int, int]:
    """Variable number -> ("g" | "L", i, j) with 0-based indices."""
    if not 0 <= var < generator_count(n):
        raise ValueError(f"{var} is not a coordinate generator for n={n}")
    if var < n * n:
        return "g", var // n, var % n
    rest = var - n * n
    return "L", rest // n, rest % n


def generator_label(n: int, var: int) -> str:
    if var == x_index(n):
        return "x"
    if var == y_index(n):
        return "y"
    kind, i, j = decode_generator(n, var)
    return f"{kind}{i + 1}{j + 1}" if n < 10 else f"{kind}[{i + 1},{j + 1}]"


def _sgn(v: int) -> int:
    return (v > 0) - (v < 0)


def _delta(a: int, b: int) -> int:
    return 1 if a == b else 0


@dataclass
class StructureTable:
    """
    Closed-form brackets of pairs of generators, cached as polynomials.

    Attributes:
        n: Matrix size
        tag: PB1, PB2 or PENCIL (x PB1 + y PB2 with symbolic x, y)
    """

    n: int
    tag: BracketTag
    _cache: Dict[Tuple[int, int], Poly] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.tag not in (BracketTag.PB1, BracketTag.PB2, BracketTag.PENCIL):
            raise ValueError(f"No structure table for {self.tag.value}")

    def g(self, i: int, j: int) -> Poly:
        return Poly.variable(g_index(self.n, i, j))

    def L(self, k: int, l: int) -> Poly:
        return Poly.variable(l_index(self.n, k, l))

    def bracket(self, a: int, b: int) -> Poly:
        """{a, b} for generator numbers a, b; central variables bracket to zero."""
        top = generator_count(self.n)
        if a >= top or b >= top or a == b:
            return Poly()
        key = (a, b)
        if key not in self._cache:
            if self.tag is BracketTag.PB1:
                value = self._pb1(a, b)
            elif self.tag is BracketTag.PB2:
                value = self._pb2(a, b)
            else:
                x = Poly.variable(x_index(self.n))
                y = Poly.variable(y_index(self.n))
                value = x * self._pb1(a, b) + y * self._pb2(a, b)
            self._cache[key] = value
        return self._cache[key]

    def _pb1(self, a: int, b: int) -> Poly:
        ka, i, j = decode_generator(self.n, a)
        kb, k, l = decode_generator(self.n, b)
        if ka == "g" and kb == "g":
            return Poly()
        if ka == "L" and kb == "g":
            return -self._pb1(b, a)
        if ka == "g":
            return self.g(k, j) * _delta(i, l)
        return self.L(k, j) * _delta(i, l) - self.L(i, l) * _delta(j, k)

    def _pb2(self, a: int, b: int) -> Poly:
        n = self.n
        ka, i, j = decode_generator(n, a)
        kb, k, l = decode_generator(n, b)
        if ka == "L" and kb == "g":
            return -self._pb2(b, a)
        if ka == "g" and kb == "g":
            coef = HALF * (_sgn(i - k) - _sgn(l - j))
            return self.g(k, j) * self.g(i, l) * coef
        if ka == "g":
            result = self.g(i, j) * self.L(k, l) * (HALF * (_delta(i, k) + _delta(i, l)))
            if i > k:
                result = result + self.g(k, j) * self.L(i, l)
            if i == l:
                for r in range(i + 1, n):
                    result = result + self.L(k, r) * self.g(r, j)
            return result
        result = (self.L(i, l) * self.L(k, j) * (HALF * (_sgn(i - k) + _sgn(l - j)))
                  + self.L(i, j) * self.L(k, l) * (HALF * (_delta(i, l) - _delta(j, k))))
        if i == l:
            for r in range(i + 1, n):
                result = result + self.L(k, r) * self.L(r, j)
        if j == k:
            for r in range(k + 1, n):
                result = result - self.L(i, r) * self.L(r, l)
        return result


def gen_bracket(tag: BracketTag, n: int, a: int, b: int) -> Poly:
    """Closed-form bracket of two generators."""
    return StructureTable(n, tag).bracket(a, b)


def poly_bracket(table: StructureTable, P: Poly, Q: Poly) -> Poly:
    """
    Extension of the structure table by bilinearity and the Leibniz rule.

    {P, Q} = sum over generators a, b of dP/da dQ/db {a, b}.
    """
    top = generator_count(table.n)
    p_vars = [v for v in P.variables() if v < top]
    q_vars = [v for v in Q.variables() if v < top]
    if not p_vars or not q_vars:
        return Poly()
    q_partials = {b: Q.derivative(b) for b in q_vars}
    result = Poly()
    for a in p_vars:
        dP = P.derivative(a)
        for b in q_vars:
            structure = table.bracket(a, b)
            if structure.is_zero():
                continue
            result = result + dP * q_partials[b] * structure
    return result


def jacobi_residual(table: StructureTable, a: int, b: int, c: int) -> Poly:
    """{a, {b, c}} + {b, {c, a}} + {c, {a, b}} as an exact polynomial."""
    A, B, C = Poly.variable(a), Poly.variable(b), Poly.variable(c)
    return (poly_bracket(table, A, table.bracket(b, c))
            + poly_bracket(table, B, table.bracket(c, a))
            + poly_bracket(table, C, table.bracket(a, b)))


def w_derivation(P: Poly, n: int) -> Poly:
    """W[P] = sum_k dP/dL_kk, the derivative along L -> L + z I."""
    result = Poly()
    for k in range(n):
        result = result + P.derivative(l_index(n, k, k))
    return result


def w_identity_residual(n: int, a: int, b: int,
                        second: Optional[StructureTable] = None,
                        first: Optional[StructureTable] = None) -> Poly:
    """W[{a, b}_2] - {W[a], b}_2 - {a, W[b]}_2 - {a, b}_1."""
    second = second or StructureTable(n, BracketTag.PB2)
    first = first or StructureTable(n, BracketTag.PB1)
    A, B = Poly.variable(a), Poly.variable(b)
    return (w_derivation(second.bracket(a, b), n)
            - poly_bracket(second, w_derivation(A, n), B)
            - poly_bracket(second, A, w_derivation(B, n))
            - first.bracket(a, b))


def antisymmetry_residual(table: StructureTable, a: int, b: int) -> Poly:
    return table.bracket(a, b) + table.bracket(b, a)


@dataclass
class JacobiCertificate:
    """
    Outcome of a Jacobi sweep.

    Attributes:
        n: Matrix size
        tag: Bracket that was checked
        lines: One line per triple, "<a> <b> <c> ZERO" or the residual polynomial
        failures: Number of triples with a non-zero residual
        total_triples: Number of triples a full sweep would check
        sampled: Whether a seeded subset was checked instead of every triple
    """

    n: int
    tag: BracketTag
    lines: List[str]
    failures: int
    total_triples: int
    sampled: bool

    @property
    def all_zero(self) -> bool:
        return self.failures == 0

    @property
    def checked(self) -> int:
        return len(self.lines)

    def render(self) -> str:
        header = (f"# jacobi {self.tag.value} n={self.n} checked={self.checked} "
                  f"of {self.total_triples} sampled={str(self.sampled).lower()}")
        return "\n".join([header] + self.lines) + "\n"


def _check_triples(n: int, tag_value: str,
                   triples: Sequence[Tuple[int, int, int]]) -> List[Tuple[Tuple[int, int, int], str]]:
    table = StructureTable(n, BracketTag(tag_value))
    out = []
    for a, b, c in triples:
        residual = jacobi_residual(table, a, b, c)
        out.append(((a, b, c), "ZERO" if residual.is_zero() else residual.to_string(n)))
    return out


def _chunks(items: Sequence[Tuple[int, int, int]], count: int) -> Iterable[Sequence[Tuple[int, int, int]]]:
    size = max(1, -(-len(items) // count))
    for start in range(0, len(items), size):
        yield items[start:start + size]


def jacobi_sweep(n: int, tag: BracketTag, max_triples: Optional[int] = None,
                 seed: int = 42, workers: int = 1) -> JacobiCertificate:
    """
    Certify the Jacobi identity on generator triples a < b < c.

    The Jacobiator is totally antisymmetric, so ordered triples of distinct
    generators cover every case; triples with a repeated generator reduce to
    antisymmetry of the table.

    Args:
        n: Matrix size
        tag: PB1, PB2 or PENCIL
        max_triples: Check a seeded random subset of this size if smaller than
            the full sweep
        seed: Seed for subset selection
        workers: Process count for the sweep

    Returns:
        JacobiCertificate with lines in triple order
    """
    triples = list(itertools.combinations(range(generator_count(n)), 3))
    total = len(triples)
    sampled = max_triples is not None and max_triples < total
    if sampled:
        rng = np.random.default_rng(seed)
        chosen = np.sort(rng.choice(total, size=max_triples, replace=False))
        triples = [triples[i] for i in chosen]
    logger.info(f"Jacobi sweep {tag.value} n={n}: {len(triples)} of {total} triples")

    if workers > 1 and len(triples) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_check_triples, n, tag.value, chunk)
                       for chunk in _chunks(triples, workers)]
            results = [item for f in futures for item in f.result()]
    else:
        results = _check_triples(n, tag.value, triples)
    results.sort(key=lambda item: item[0])

    lines = []
    failures = 0
    for (a, b, c), verdict in results:
        if verdict != "ZERO":
            failures += 1
            logger.warning(f"Jacobi residual non-zero for {(a, b, c)}: {verdict}")
        labels = " ".join(generator_label(n, v) for v in (a, b, c))
        lines.append(f"{labels} {verdict}")
    return JacobiCertificate(n=n, tag=tag, lines=lines, failures=failures,
                             total_triples=total, sampled=sampled)


def point_values(g: np.ndarray, L: np.ndarray) -> Dict[int, complex]:
    """Map every generator of the point (g, L) to its numeric value."""
    n = g.shape[0]
    values: Dict[int, complex] = {}
    for i in range(n):
        for j in range(n):
            values[g_index(n, i, j)] = complex(g[i, j])
            values[l_index(n, i, j)] = complex(L[i, j])
    return values
