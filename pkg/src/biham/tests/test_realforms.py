"""
Tests for the hyperbolic and trigonometric real slices.
"""

import numpy as np
import pytest

from ..dynamics.realforms import (
    HyperbolicPoint,
    SliceKind,
    SlicePoint,
    TrigPoint,
    conjugation_identity_check,
    flow_direction,
    hyp_pb,
    random_slice_point,
    real_derivatives,
    slice_flow,
    slice_observables,
    trig_pb,
)
from ..dynamics.reduction import reduced_pb1, reduced_pb2, restrict
from ..errors import SymmetryClassError
from ..linalg.core import random_hermitian, random_matrix
from ..poisson.observables import TraceWordObservable


class TestSlicePoint:
    """Test cases for slice point construction."""

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            HyperbolicPoint(np.array([0.0, 1.0]), np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_complex_positions(self):
        with pytest.raises(ValueError):
            TrigPoint(np.array([0.0, 1.0 + 0.1j]), np.eye(2))

    def test_accepts_diagonal_matrix_positions(self):
        point = HyperbolicPoint(np.diag([0.0, 1.0]), np.eye(2))
        assert np.array_equal(point.q, np.array([0.0, 1.0]))

    def test_Q(self):
        q = np.array([0.0, 1.0])
        assert np.allclose(HyperbolicPoint(q, np.eye(2)).Q, np.diag(np.exp(q)))
        assert np.allclose(np.abs(np.diag(TrigPoint(q, np.eye(2)).Q)), 1.0)

    def test_flow_direction(self):
        assert flow_direction(SliceKind.HYPERBOLIC) == 1.0
        assert flow_direction(SliceKind.TRIGONOMETRIC) == 1j


class TestSliceBrackets:
    """Test cases for the real forms of the reduced brackets."""

    @pytest.fixture(params=list(SliceKind))
    def kind(self, request):
        return request.param

    @pytest.fixture
    def point(self, kind):
        return random_slice_point(kind, 3, np.random.default_rng(42))

    def test_brackets_and_slice_formulas(self, kind, point):
        family = [restrict(F) for F in slice_observables(kind)]
        rp = point.to_reduced()
        slice_pb = hyp_pb if kind is SliceKind.HYPERBOLIC else trig_pb
        for f in family:
            for h in family:
                for i, reduced in ((1, reduced_pb1), (2, reduced_pb2)):
                    value = reduced(f, h, rp)
                    part = value.imag if kind is SliceKind.HYPERBOLIC else value.real
                    assert abs(part) <= 1e-12 * (1 + abs(value))
                    assert abs(slice_pb(i, f, h, point) - value) <= 1e-12 * (1 + abs(value))

    def test_observables_are_real_on_the_slice(self, kind, point):
        for F in slice_observables(kind):
            value = F.evaluate(point.to_reduced().as_phase_point())
            assert abs(value.imag) <= 1e-12 * (1 + abs(value))

    def test_real_derivatives_classes(self, kind, point):
        d = real_derivatives(restrict(TraceWordObservable("ll")), point)
        assert np.allclose(d.d2, d.d2.conj().T)
        assert np.allclose(d.D2, -d.D2.conj().T)

    def test_non_real_function(self, kind, point):
        f = restrict(1j * TraceWordObservable("ll"))
        with pytest.raises(SymmetryClassError):
            real_derivatives(f, point)

    def test_wrong_slice_or_index(self, kind, point):
        f = restrict(TraceWordObservable("ll"))
        wrong = trig_pb if kind is SliceKind.HYPERBOLIC else hyp_pb
        right = hyp_pb if kind is SliceKind.HYPERBOLIC else trig_pb
        with pytest.raises(ValueError):
            wrong(1, f, f, point)
        with pytest.raises(ValueError):
            right(3, f, f, point)

    def test_conjugation_identity(self, kind, point):
        X = random_matrix(np.random.default_rng(1), 3)
        assert conjugation_identity_check(kind, point.Q, X) < 1e-12 * (1 + 10 * np.linalg.norm(X))
        other = SliceKind.TRIGONOMETRIC if kind is SliceKind.HYPERBOLIC else SliceKind.HYPERBOLIC
        assert conjugation_identity_check(other, point.Q, X) > 1e-3

    @pytest.mark.parametrize("m", [1, 2])
    def test_flow_stays_on_the_slice(self, kind, m):
        rng = np.random.default_rng(7)
        start = random_slice_point(kind, 3, rng, scale=0.3)
        traj = slice_flow(start, m, 0.1, 200, [TraceWordObservable("ll")])
        assert traj.hermiticity_drift() < 1e-10
        assert traj.starts_hermitian()
        q = traj.final.q
        if kind is SliceKind.HYPERBOLIC:
            assert np.max(np.abs(q.imag)) < 1e-12
        else:
            assert np.allclose(np.abs(q), 1.0, atol=1e-12)

    def test_random_point_is_reproducible(self, kind):
        a = random_slice_point(kind, 4, np.random.default_rng(5))
        b = random_slice_point(kind, 4, np.random.default_rng(5))
        assert np.array_equal(a.q, b.q) and np.array_equal(a.L, b.L)
        assert isinstance(a, SlicePoint)


def test_random_hermitian_is_hermitian():
    H = random_hermitian(np.random.default_rng(0), 3)
    assert np.array_equal(H, H.conj().T)
