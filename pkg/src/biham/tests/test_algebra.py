"""
Tests for the exact polynomial Poisson algebra.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ..algebra.gaussian import HALF, GaussianRational
from ..algebra.poly import (
    Poly,
    StructureTable,
    antisymmetry_residual,
    decode_generator,
    g_index,
    gen_bracket,
    generator_count,
    jacobi_sweep,
    l_index,
    point_values,
    poly_bracket,
    w_derivation,
    w_identity_residual,
    x_index,
)
from ..poisson.brackets import BracketTag, pb1, pb2
from ..poisson.observables import CoordinateKind, CoordinateObservable, PhasePoint

fractions = st.fractions(min_value=-100, max_value=100, max_denominator=50)


class TestGaussianRational:
    """Test cases for exact Gaussian rationals."""

    def test_multiplication(self):
        assert GaussianRational(1, 2) * GaussianRational(3, -1) == GaussianRational(5, 5)

    def test_division_inverts_multiplication(self):
        a, b = GaussianRational(Fraction(1, 3), 2), GaussianRational(-1, Fraction(1, 7))
        assert (a / b) * b == a

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            GaussianRational(1) / GaussianRational(0)

    def test_floats_convert_exactly(self):
        assert GaussianRational.of(0.5) == HALF
        assert GaussianRational.of(complex(0.25, -1.0)) == GaussianRational(Fraction(1, 4), -1)

    def test_equality_and_hash(self):
        assert GaussianRational(3) == 3
        assert hash(GaussianRational(Fraction(2, 4))) == hash(GaussianRational(Fraction(1, 2)))
        assert not GaussianRational(0, 0)

    def test_str(self):
        assert str(GaussianRational(Fraction(1, 2))) == "1/2"
        assert str(GaussianRational(0, 2)) == "2i"
        assert str(GaussianRational(1, -2)) == "(1-2i)"

    @given(fractions, fractions, fractions, fractions, fractions, fractions)
    def test_distributive(self, a, b, c, d, e, f):
        x, y, z = GaussianRational(a, b), GaussianRational(c, d), GaussianRational(e, f)
        assert x * (y + z) == x * y + x * z
        assert x * y == y * x


class TestPoly:
    """Test cases for sparse polynomials."""

    @pytest.fixture
    def xy(self):
        return Poly.variable(0), Poly.variable(1)

    def test_binomial(self, xy):
        x, y = xy
        assert (x + y) ** 2 == x * x + 2 * x * y + y * y

    def test_cancellation_leaves_zero(self, xy):
        x, _ = xy
        assert (x - x).is_zero()
        assert (x * 0).is_zero()

    def test_derivative(self, xy):
        x, y = xy
        assert (x ** 3 * y).derivative(0) == 3 * x ** 2 * y
        assert (x ** 3).derivative(1).is_zero()

    def test_exact_evaluation(self, xy):
        x, y = xy
        P = x * y + HALF
        assert P.evaluate({0: 2, 1: GaussianRational(0, 1)}) == GaussianRational(Fraction(1, 2), 2)
        assert P.evaluate_complex({0: 2.0, 1: 1j}) == pytest.approx(0.5 + 2j)

    def test_w_derivation(self):
        n = 2
        P = Poly.variable(l_index(n, 0, 0)) * Poly.variable(l_index(n, 1, 1))
        expected = Poly.variable(l_index(n, 1, 1)) + Poly.variable(l_index(n, 0, 0))
        assert w_derivation(P, n) == expected
        assert w_derivation(Poly.variable(g_index(n, 0, 0)), n).is_zero()


class TestStructureTable:
    """Test cases for the closed-form generator brackets."""

    @pytest.fixture
    def first(self):
        return StructureTable(2, BracketTag.PB1)

    @pytest.fixture
    def second(self):
        return StructureTable(2, BracketTag.PB2)

    def test_decode_generator(self):
        assert decode_generator(2, g_index(2, 1, 0)) == ("g", 1, 0)
        assert decode_generator(2, l_index(2, 0, 1)) == ("L", 0, 1)
        with pytest.raises(ValueError):
            decode_generator(2, x_index(2))

    def test_first_bracket_values(self, first):
        n = 2
        # {g_ij, L_kl}_1 = delta_il g_kj
        assert first.bracket(g_index(n, 0, 1), l_index(n, 1, 0)) == first.g(1, 1)
        assert first.bracket(g_index(n, 0, 1), l_index(n, 1, 1)).is_zero()
        assert first.bracket(g_index(n, 0, 0), g_index(n, 1, 1)).is_zero()
        assert first.bracket(l_index(n, 0, 1), l_index(n, 1, 0)) == first.L(1, 1) - first.L(0, 0)

    def test_central_variables(self, first):
        assert first.bracket(x_index(2), g_index(2, 0, 0)).is_zero()

    def test_unknown_tag(self):
        with pytest.raises(ValueError):
            StructureTable(2, BracketTag.PB2_INVARIANT)

    @pytest.mark.parametrize("tag", [BracketTag.PB1, BracketTag.PB2, BracketTag.PENCIL])
    def test_antisymmetry(self, tag):
        table = StructureTable(2, tag)
        for a, b in itertools.product(range(generator_count(2)), repeat=2):
            assert antisymmetry_residual(table, a, b).is_zero()

    def test_matches_numeric_brackets(self, first, second):
        n = 2
        rng = np.random.default_rng(3)
        g = np.round((np.eye(n) + 0.3 * rng.standard_normal((n, n))) * 64) / 64
        L = np.round(rng.standard_normal((n, n)) * 64) / 64 + 0.5j
        p = PhasePoint(g, L)
        values = point_values(g, L)
        coords = [CoordinateObservable(CoordinateKind(kind), i, j)
                  for kind, i, j in (decode_generator(n, v) for v in range(generator_count(n)))]
        for a, b in itertools.product(range(generator_count(n)), repeat=2):
            # dyadic inputs make the float brackets exact
            assert GaussianRational.of(pb1(coords[a], coords[b], p)) == first.bracket(a, b).evaluate(values)
            assert GaussianRational.of(pb2(coords[a], coords[b], p)) == second.bracket(a, b).evaluate(values)

    def test_poly_bracket_extends_generators(self, second):
        a, b = g_index(2, 0, 1), l_index(2, 1, 0)
        assert poly_bracket(second, Poly.variable(a), Poly.variable(b)) == second.bracket(a, b)
        assert gen_bracket(BracketTag.PB2, 2, a, b) == second.bracket(a, b)

    def test_leibniz(self, second):
        a, b, c = g_index(2, 0, 0), l_index(2, 0, 1), l_index(2, 1, 0)
        A, B, C = Poly.variable(a), Poly.variable(b), Poly.variable(c)
        assert poly_bracket(second, A * B, C) == A * second.bracket(b, c) + B * second.bracket(a, c)

    def test_w_identity(self, first, second):
        for a, b in itertools.combinations(range(generator_count(2)), 2):
            assert w_identity_residual(2, a, b, second, first).is_zero()


class TestJacobiSweep:
    """Test cases for Jacobi certificates."""

    @pytest.mark.parametrize("tag", [BracketTag.PB1, BracketTag.PB2, BracketTag.PENCIL])
    def test_full_sweep_is_zero(self, tag):
        cert = jacobi_sweep(2, tag)
        assert cert.all_zero
        assert cert.checked == 56
        assert not cert.sampled
        assert all(line.endswith(" ZERO") for line in cert.lines)

    def test_render_header(self):
        text = jacobi_sweep(2, BracketTag.PB2).render()
        assert text.startswith("# jacobi PB2 n=2 checked=56 of 56 sampled=false\n")

    def test_sampled_sweep_is_deterministic(self):
        a = jacobi_sweep(2, BracketTag.PB2, max_triples=10, seed=5)
        b = jacobi_sweep(2, BracketTag.PB2, max_triples=10, seed=5)
        assert a.sampled and a.checked == 10
        assert a.lines == b.lines

    def test_workers_do_not_change_the_certificate(self):
        serial = jacobi_sweep(2, BracketTag.PB1)
        parallel = jacobi_sweep(2, BracketTag.PB1, workers=2)
        assert serial.render() == parallel.render()
