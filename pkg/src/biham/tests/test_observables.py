"""
Tests for phase points, observables and their derivative oracles.
"""

import numpy as np
import pytest

from ..errors import NotInvertibleError, SizeMismatchError
from ..linalg.core import random_matrix, random_near_identity
from ..poisson.observables import (
    CallableObservable,
    CoordinateKind,
    CoordinateObservable,
    DimensionObservable,
    PhasePoint,
    TraceWordObservable,
    analytic_derivatives,
    check_invariance,
    extrapolated_fd_derivatives,
    fd_derivatives,
    free_hamiltonian_observable,
    g_entry,
    invariant_identity_check,
    l_entry,
    parse_observable,
    trace_words,
)

WORDS = ["l", "ll", "lll", "g", "gl", "gll", "Gl", "glGl", "ggl"]


def _relative_distance(F, p):
    analytic = F.derivatives(p)
    return analytic.distance(fd_derivatives(F, p)) / (1.0 + analytic.magnitude())


class TestPhasePoint:
    """Test cases for PhasePoint validation."""

    def test_singular_g(self):
        with pytest.raises(NotInvertibleError):
            PhasePoint(np.zeros((2, 2)), np.eye(2))

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatchError):
            PhasePoint(np.eye(2), np.eye(3))

    def test_conjugate(self):
        p = PhasePoint(np.diag([1.0, 2.0]), np.array([[0.0, 1.0], [2.0, 0.0]]))
        swap = np.array([[0.0, 1.0], [1.0, 0.0]])
        q = p.conjugate(swap)
        assert np.allclose(q.g, np.diag([2.0, 1.0]))
        assert np.allclose(q.L, np.array([[0.0, 2.0], [1.0, 0.0]]))


class TestObservables:
    """Test cases for evaluation and analytic derivatives."""

    @pytest.fixture
    def point(self):
        rng = np.random.default_rng(42)
        return PhasePoint(random_near_identity(rng, 3, 0.6), random_matrix(rng, 3, 0.5))

    def test_trace_word_value(self, point):
        g, L = point.g, point.L
        expected = np.trace(g @ L @ np.linalg.inv(g) @ L)
        assert TraceWordObservable("glGl").evaluate(point) == pytest.approx(expected, rel=1e-12)

    def test_bad_words(self):
        with pytest.raises(ValueError):
            TraceWordObservable("")
        with pytest.raises(ValueError):
            TraceWordObservable("gx")

    def test_coordinates(self, point):
        F = g_entry(0, 2)
        assert F.evaluate(point) == point.g[0, 2]
        assert F.label == "g[1,3]"
        assert l_entry(2, 1).evaluate(point) == point.L[2, 1]
        with pytest.raises(ValueError):
            g_entry(3, 0).evaluate(point)
        with pytest.raises(ValueError):
            CoordinateObservable(CoordinateKind.L_ENTRY, -1, 0)

    @pytest.mark.parametrize("word", WORDS)
    def test_word_derivatives_match_finite_differences(self, point, word):
        assert _relative_distance(TraceWordObservable(word), point) < 1e-7

    def test_coordinate_derivatives_match_finite_differences(self, point):
        for F in (g_entry(1, 2), l_entry(0, 1), l_entry(2, 2)):
            assert _relative_distance(F, point) < 1e-7

    @pytest.mark.parametrize("word", ["glGl", "ggl", "lll"])
    def test_extrapolated_differences(self, point, word):
        F = TraceWordObservable(word)
        analytic = F.derivatives(point)
        extrapolated = extrapolated_fd_derivatives(F, point)
        assert analytic.distance(extrapolated) / (1.0 + analytic.magnitude()) < 1e-10
        wrapped = CallableObservable(lambda g, L: F.evaluate(PhasePoint(g, L)), extrapolate=True)
        assert wrapped.derivatives(point).distance(extrapolated) == 0.0

    def test_analytic_derivatives_closed_forms(self):
        g = np.array([[1.0, 5.0], [0.0, 1.0]])
        L = np.array([[1.0, 2.0], [-1.0, 3.0]])
        p = PhasePoint(g, L)
        e21 = np.array([[0.0, 0.0], [1.0, 0.0]])
        assert np.allclose(analytic_derivatives(0.5 * TraceWordObservable("ll"), p).d2, L)
        coordinate = analytic_derivatives(g_entry(0, 1), p)
        assert np.allclose(coordinate.nabla1, g @ e21)
        assert np.allclose(coordinate.nabla1p, e21 @ g)
        trace_g = analytic_derivatives(TraceWordObservable("g"), p)
        assert np.allclose(trace_g.nabla1, g)
        assert np.allclose(trace_g.d2, 0)

    def test_trace_words(self):
        assert [len(trace_words(k)) for k in (1, 2, 3, 4)] == [3, 9, 20, 44]
        words = trace_words(4)
        assert len(set(words)) == len(words)
        assert "Glgl" in words and "glGl" not in words
        with pytest.raises(ValueError):
            trace_words(0)

    def test_combinations_and_products(self, point):
        F, H = TraceWordObservable("gl"), TraceWordObservable("ll")
        combo = 2.0 * F - H
        product = F * H
        assert combo.evaluate(point) == pytest.approx(2 * F.evaluate(point) - H.evaluate(point))
        assert product.evaluate(point) == pytest.approx(F.evaluate(point) * H.evaluate(point))
        assert _relative_distance(product, point) < 1e-7
        assert _relative_distance(combo, point) < 1e-7
        assert combo.invariant and product.invariant
        assert not (F * g_entry(0, 0)).invariant

    def test_scalar_offsets(self, point):
        F = TraceWordObservable("gl")
        value = F.evaluate(point)
        assert (F + 2).evaluate(point) == pytest.approx(value + 2)
        assert (2 + F).evaluate(point) == pytest.approx(value + 2)
        assert (F - 1.5).evaluate(point) == pytest.approx(value - 1.5)
        assert (1.5 - F).evaluate(point) == pytest.approx(1.5 - value)
        assert (F + 2).derivatives(point).distance(F.derivatives(point)) < 1e-12
        assert (1.5 - F).invariant
        with pytest.raises(TypeError):
            F + "ll"
        with pytest.raises(TypeError):
            F * [1.0]

    def test_right_derivative_is_conjugated_left(self, point):
        b = TraceWordObservable("glGl").derivatives(point)
        assert np.allclose(b.nabla1p, point.g_inv @ b.nabla1 @ point.g, atol=1e-12)

    def test_callable_observable(self, point):
        F = CallableObservable(lambda g, L: np.trace(g @ L), "gl", invariant=True)
        exact = TraceWordObservable("gl").derivatives(point)
        assert F.evaluate(point) == pytest.approx(TraceWordObservable("gl").evaluate(point))
        assert F.derivatives(point).distance(exact) < 1e-7
        assert F.w_derivative().evaluate(point) == pytest.approx(np.trace(point.g), abs=1e-8)

    def test_fd_step_range(self, point):
        F = TraceWordObservable("ll")
        with pytest.raises(ValueError):
            fd_derivatives(F, point, 0.1)
        with pytest.raises(ValueError):
            fd_derivatives(F, point, 0.0)

    def test_w_derivative(self, point):
        assert TraceWordObservable("ll").w_derivative().evaluate(point) == pytest.approx(
            2 * np.trace(point.L))
        assert TraceWordObservable("l").w_derivative().evaluate(point) == pytest.approx(3)
        assert isinstance(TraceWordObservable("l").w_derivative().terms[0][1], DimensionObservable)
        assert l_entry(1, 1).w_derivative().evaluate(point) == 1
        assert l_entry(0, 1).w_derivative().evaluate(point) == 0
        assert g_entry(0, 0).w_derivative().evaluate(point) == 0

    def test_invariance(self, point):
        for word in WORDS:
            F = TraceWordObservable(word)
            assert check_invariance(F, point, trials=3) < 1e-10 * (1 + abs(F.evaluate(point)))
            scale = 1 + F.derivatives(point).magnitude()
            assert invariant_identity_check(F, point) < 1e-10 * scale
        assert check_invariance(g_entry(0, 1), point, trials=3) > 1e-3

    def test_free_hamiltonian(self, point):
        H = free_hamiltonian_observable(3)
        L = point.L
        assert H.evaluate(point) == pytest.approx(np.trace(L @ L @ L) / 3)
        with pytest.raises(ValueError):
            free_hamiltonian_observable(0)


class TestParseObservable:
    """Test cases for the command-line observable syntax."""

    def test_coordinate(self):
        F = parse_observable("g[1,2]")
        assert isinstance(F, CoordinateObservable)
        assert (F.kind, F.i, F.j) == (CoordinateKind.G_ENTRY, 0, 1)

    def test_word_with_coefficient(self):
        F = parse_observable("0.5*ll")
        assert isinstance(F, TraceWordObservable)
        assert F.word == "ll" and F.coefficient == 0.5

    def test_plain_word(self):
        assert parse_observable(" glGl ").label == "glGl"

    @pytest.mark.parametrize("text", ["x", "abc*ll", "L[0,1]", ""])
    def test_rejects(self, text):
        with pytest.raises(ValueError):
            parse_observable(text)
