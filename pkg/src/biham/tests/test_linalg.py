"""
Tests for the dense linear algebra helpers.
"""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ..errors import (
    BranchCutError,
    MatrixOverflowError,
    NotInvertibleError,
    NotRegularError,
    SingularMinorError,
    SizeMismatchError,
)
from ..linalg.codec import decode_complex, decode_matrix, encode_matrix, load_matrices
from ..linalg.core import (
    as_matrix,
    commutator,
    inverse,
    mat_exp,
    min_gap,
    random_matrix,
    random_near_identity,
    relative_residual,
    split,
    trace_pairing,
)
from ..linalg.gauss import (
    GaussOrder,
    diagonalize_regular,
    gauss_decompose,
    principal_sqrt_diagonal,
)

entries = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


class TestCore:
    """Test cases for the core matrix primitives."""

    @pytest.fixture
    def rng(self):
        return np.random.default_rng(42)

    def test_as_matrix_rejects_non_square(self):
        with pytest.raises(ValueError):
            as_matrix(np.zeros((2, 3)))

    def test_as_matrix_rejects_non_finite(self):
        with pytest.raises(ValueError):
            as_matrix([[1.0, np.nan], [0.0, 1.0]])

    def test_as_matrix_rejects_scalar_matrices(self):
        with pytest.raises(SizeMismatchError):
            as_matrix([[1.0]])
        with pytest.raises(SizeMismatchError):
            as_matrix(np.zeros((0, 0)))

    def test_trace_pairing_matches_trace_of_product(self, rng):
        X, Y = random_matrix(rng, 3), random_matrix(rng, 3)
        assert trace_pairing(X, Y) == pytest.approx(np.trace(X @ Y), rel=1e-12)

    def test_size_mismatch(self, rng):
        with pytest.raises(SizeMismatchError):
            trace_pairing(random_matrix(rng, 2), random_matrix(rng, 3))
        # SizeMismatchError is also a ValueError
        with pytest.raises(ValueError):
            commutator(random_matrix(rng, 2), random_matrix(rng, 3))

    @given(st.lists(entries, min_size=4, max_size=4), st.lists(entries, min_size=4, max_size=4))
    @settings(max_examples=50)
    def test_trace_pairing_is_symmetric(self, xs, ys):
        X = np.array(xs, dtype=np.complex128).reshape(2, 2)
        Y = np.array(ys, dtype=np.complex128).reshape(2, 2)
        assert trace_pairing(X, Y) == pytest.approx(trace_pairing(Y, X), rel=1e-12, abs=1e-9)

    def test_split_parts(self, rng):
        X = random_matrix(rng, 4)
        parts = split(X)
        assert np.array_equal(parts.reconstruct(), X)
        assert np.array_equal(np.tril(parts.strict_upper), np.zeros((4, 4)))
        assert np.array_equal(np.triu(parts.strict_lower), np.zeros((4, 4)))
        assert np.array_equal(parts.off_diagonal + parts.diagonal, X)

    def test_commutator_is_antisymmetric(self, rng):
        X, Y = random_matrix(rng, 3), random_matrix(rng, 3)
        assert np.allclose(commutator(X, Y), -commutator(Y, X), rtol=0, atol=1e-14)

    def test_exp_of_zero_is_identity(self):
        assert np.array_equal(mat_exp(np.zeros((3, 3))), np.eye(3))

    def test_exp_group_property(self, rng):
        X = random_matrix(rng, 3, 0.5)
        assert relative_residual(mat_exp(0.3 * X) @ mat_exp(0.7 * X), mat_exp(X)) < 1e-12

    def test_exp_overflow(self):
        with pytest.raises(MatrixOverflowError):
            mat_exp(np.diag([1000.0, 0.0]))

    def test_inverse_of_singular_matrix(self):
        with pytest.raises(NotInvertibleError):
            inverse(np.zeros((2, 2)))

    def test_random_near_identity_radius(self, rng):
        for _ in range(10):
            g = random_near_identity(rng, 3, 0.4)
            assert np.linalg.norm(g - np.eye(3)) <= 0.4 + 1e-12

    def test_min_gap(self):
        assert min_gap(np.array([1.0, 3.0, 3.5])) == pytest.approx(0.5)
        assert min_gap(np.array([1.0])) == np.inf


class TestGauss:
    """Test cases for Gauss factorization and regular diagonalization."""

    @pytest.fixture
    def rng(self):
        return np.random.default_rng(7)

    @pytest.mark.parametrize("order", list(GaussOrder))
    def test_factors_recompose(self, rng, order):
        A = random_near_identity(rng, 4, 0.5)
        f = gauss_decompose(A, order)
        assert np.allclose(f.recompose(), A, rtol=0, atol=1e-12)
        assert np.allclose(np.tril(f.upper_unipotent, -1), 0)
        assert np.allclose(np.triu(f.lower_unipotent, 1), 0)
        assert np.allclose(np.diag(f.upper_unipotent), 1)
        assert np.allclose(np.diag(f.lower_unipotent), 1)
        assert np.allclose(f.diagonal, np.diag(np.diag(f.diagonal)))

    @pytest.mark.parametrize("order", list(GaussOrder))
    def test_vanishing_minor(self, order):
        with pytest.raises(SingularMinorError):
            gauss_decompose(np.array([[0.0, 1.0], [1.0, 0.0]]), order)

    def test_principal_sqrt(self):
        D = np.diag([4.0, -1.0 + 1.0j])
        S = principal_sqrt_diagonal(D)
        assert np.allclose(S @ S, D, rtol=0, atol=1e-14)
        assert S[0, 0] == pytest.approx(2.0)

    def test_sqrt_on_branch_cut(self):
        with pytest.raises(BranchCutError):
            principal_sqrt_diagonal(np.diag([-1.0, 1.0]))

    def test_diagonal_input_is_sorted(self):
        eta, Q = diagonalize_regular(np.diag([2.0, 1.0]))
        assert np.array_equal(np.diag(Q), np.array([1.0, 2.0]))
        assert np.array_equal(eta, np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_generic_input(self, rng):
        E = random_matrix(rng, 3)
        g = np.diag([3.0, 1.0, 2.0]) + 0.3 * E / np.linalg.norm(E)
        eta, Q = diagonalize_regular(g)
        assert np.allclose(eta @ g @ np.linalg.inv(eta), Q, rtol=0, atol=1e-10)
        q = np.diag(Q)
        assert list(np.argsort(q.real)) == [0, 1, 2]
        eta2, Q2 = diagonalize_regular(g)
        assert np.array_equal(eta, eta2) and np.array_equal(Q, Q2)

    def test_roundoff_equal_real_parts_sort_by_imaginary(self):
        eta, Q = diagonalize_regular(np.diag([1.0 + 1.0j, (1.0 + 1e-15) - 1.0j]))
        assert np.diag(Q)[0].imag == -1.0
        assert np.array_equal(eta, np.array([[0.0, 1.0], [1.0, 0.0]]))
        rotation = np.array([[1.0, -1.0], [1.0, 1.0]])
        eta, Q = diagonalize_regular(rotation)
        assert np.allclose(np.diag(Q), [1.0 - 1.0j, 1.0 + 1.0j], atol=1e-12)
        assert np.allclose(eta @ rotation @ np.linalg.inv(eta), Q, atol=1e-12)

    def test_repeated_eigenvalues(self):
        with pytest.raises(NotRegularError) as info:
            diagonalize_regular(np.eye(2))
        assert info.value.gap == 0.0

    def test_singular_input(self):
        with pytest.raises(NotInvertibleError):
            diagonalize_regular(np.ones((2, 2)))


class TestCodec:
    """Test cases for the JSON matrix codec."""

    def test_encode_is_json_ready(self):
        X = np.array([[1 + 2j, 0.5], [-1j, 3]])
        record = encode_matrix(X)
        assert record["n"] == 2
        assert record["entries"][0][0] == [1.0, 2.0]
        assert np.array_equal(decode_matrix(json.loads(json.dumps(record))), X)

    def test_decode_complex_accepts_reals(self):
        assert decode_complex(2) == 2 + 0j
        with pytest.raises(ValueError):
            decode_complex([1, 2, 3])

    def test_declared_size_must_match(self):
        with pytest.raises(ValueError):
            decode_matrix({"n": 3, "entries": [[[1, 0]]]})
        with pytest.raises(ValueError):
            decode_matrix({"entries": [[[1, 0]]]})

    def test_load_matrices(self, tmp_path):
        path = tmp_path / "point.json"
        path.write_text(json.dumps({"g": encode_matrix(np.eye(2)),
                                    "L": encode_matrix(np.diag([1.0, 2.0]))}))
        matrices = load_matrices(path)
        assert sorted(matrices) == ["L", "g"]
        assert np.array_equal(matrices["L"], np.diag([1.0, 2.0]))
