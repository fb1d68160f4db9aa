"""
r-matrices, observables and the two holomorphic Poisson brackets.
"""
from .rmatrix import DynamicalR, dyn_R, dyn_R_coth, r_bracket, r_const, r_minus, r_plus
from .observables import (
    DerivativeBundle,
    Observable,
    PhasePoint,
    TraceWordObservable,
    fd_derivatives,
    parse_observable,
)
from .brackets import BracketKind, BracketTag, pb1, pb2, pb2_invariant, pencil

__all__ = [
    "DynamicalR",
    "dyn_R",
    "dyn_R_coth",
    "r_bracket",
    "r_const",
    "r_minus",
    "r_plus",
    "DerivativeBundle",
    "Observable",
    "PhasePoint",
    "TraceWordObservable",
    "fd_derivatives",
    "parse_observable",
    "BracketKind",
    "BracketTag",
    "pb1",
    "pb2",
    "pb2_invariant",
    "pencil",
]
