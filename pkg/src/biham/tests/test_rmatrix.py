"""
Tests for the constant and dynamical r-matrices.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ..errors import NotInvertibleError, NotRegularError, SizeMismatchError
from ..linalg.core import random_matrix, trace_pairing
from ..poisson.rmatrix import (
    DynamicalR,
    dyn_R,
    dyn_R_coth,
    mcybe_residual,
    r_bracket,
    r_const,
    r_minus,
    r_plus,
)

entries = st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False)


class TestConstantR:
    """Test cases for r, r_+ and r_-."""

    @given(st.lists(entries, min_size=9, max_size=9))
    @settings(max_examples=50)
    def test_shifts_differ_by_identity(self, values):
        X = np.array(values, dtype=np.complex128).reshape(3, 3)
        assert np.allclose(r_plus(X) - r_minus(X), X, rtol=0, atol=1e-12)
        assert np.allclose(0.5 * (r_plus(X) + r_minus(X)), r_const(X), rtol=0, atol=1e-12)

    def test_modified_yang_baxter(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            X, Y = random_matrix(rng, 4), random_matrix(rng, 4)
            scale = 1.0 + np.linalg.norm(X) * np.linalg.norm(Y)
            assert mcybe_residual(X, Y) / scale < 1e-12

    def test_r_is_antisymmetric(self):
        rng = np.random.default_rng(1)
        X, Y = random_matrix(rng, 3), random_matrix(rng, 3)
        assert trace_pairing(r_const(X), Y) == pytest.approx(-trace_pairing(X, r_const(Y)))


class TestDynamicalR:
    """Test cases for R(Q)."""

    @pytest.fixture
    def Q(self):
        return np.diag([1.0, 2.0, 3.0 + 0.5j])

    def test_known_multipliers(self):
        R = DynamicalR(np.diag([2.0, 1.0]))
        assert R.multipliers[0, 1] == pytest.approx(1.5)
        assert R.multipliers[1, 0] == pytest.approx(-1.5)
        assert dyn_R(np.diag([2.0, 1.0]), np.ones((2, 2)))[0, 1] == pytest.approx(1.5)

    def test_vanishes_on_diagonal(self, Q):
        assert np.array_equal(DynamicalR(Q)(np.diag([1.0, 2.0, 3.0])), np.zeros((3, 3)))

    def test_antisymmetry(self, Q):
        rng = np.random.default_rng(2)
        R = DynamicalR(Q)
        X, Y = random_matrix(rng, 3), random_matrix(rng, 3)
        assert trace_pairing(R(X), Y) == pytest.approx(-trace_pairing(X, R(Y)), abs=1e-12)

    def test_shifted(self, Q):
        X = np.ones((3, 3))
        R = DynamicalR(Q)
        assert np.allclose(R.shifted(X), R(X) + 0.5 * X)

    def test_collision(self):
        with pytest.raises(NotRegularError):
            DynamicalR(np.diag([1.0, 1.0]))
        with pytest.raises(NotRegularError):
            DynamicalR(np.diag([1.0, 1.0 + 1e-9]), tol_reg=1e-8)

    def test_vanishing_entry(self):
        with pytest.raises(NotInvertibleError):
            DynamicalR(np.diag([0.0, 1.0]))
        with pytest.raises(NotInvertibleError):
            dyn_R(np.diag([1.0, 0.0, 2.0]), np.ones((3, 3)))

    def test_non_diagonal_Q(self):
        with pytest.raises(ValueError):
            DynamicalR(np.array([[2.0, 5.0], [0.0, 1.0]]))

    def test_scalar_Q(self):
        with pytest.raises(SizeMismatchError):
            DynamicalR(np.diag([2.0]))

    def test_coth_form(self):
        q = np.array([0.1 + 0.2j, 1.0 - 0.3j, 2.2])
        X = random_matrix(np.random.default_rng(4), 3)
        assert np.allclose(dyn_R_coth(q, X), dyn_R(np.diag(np.exp(q)), X), rtol=1e-12, atol=1e-12)

    def test_bracket(self, Q):
        rng = np.random.default_rng(5)
        X, Y = random_matrix(rng, 3), random_matrix(rng, 3)
        R = DynamicalR(Q)
        expected = (R(X) @ Y - Y @ R(X)) + (X @ R(Y) - R(Y) @ X)
        assert np.allclose(r_bracket(Q, X, Y), expected)
        assert np.allclose(R.bracket(X, Y), -R.bracket(Y, X))
