"""
Reduction, hierarchy flows and real slices.
"""
from .reduction import ReducedObservable, ReducedPoint, project, reduced_pb1, reduced_pb2, restrict
from .hierarchy import (
    SUTHERLAND_POTENTIAL_SIGN,
    CanonicalSutherlandPoint,
    Trajectory,
    exact_flow,
    free_hamiltonian,
    integrate_reduced,
    sutherland_embed,
)
from .realforms import SliceKind, SlicePoint, hyp_pb, trig_pb

__all__ = [
    "ReducedObservable",
    "ReducedPoint",
    "project",
    "reduced_pb1",
    "reduced_pb2",
    "restrict",
    "SUTHERLAND_POTENTIAL_SIGN",
    "CanonicalSutherlandPoint",
    "Trajectory",
    "exact_flow",
    "free_hamiltonian",
    "integrate_reduced",
    "sutherland_embed",
    "SliceKind",
    "SlicePoint",
    "hyp_pb",
    "trig_pb",
]
