"""
Dense complex linear algebra for biham.
"""
from .core import (
    ComplexMatrix,
    TriangularSplit,
    as_matrix,
    basis_matrix,
    commutator,
    diagonal_part,
    inverse,
    mat_exp,
    split,
    trace_pairing,
)
from .gauss import (
    GaussFactors,
    GaussOrder,
    diagonalize_regular,
    gauss_decompose,
    principal_sqrt_diagonal,
)
from .codec import decode_matrix, encode_matrix, load_matrices

__all__ = [
    "ComplexMatrix",
    "TriangularSplit",
    "as_matrix",
    "basis_matrix",
    "commutator",
    "diagonal_part",
    "inverse",
    "mat_exp",
    "split",
    "trace_pairing",
    "GaussFactors",
    "GaussOrder",
    "diagonalize_regular",
    "gauss_decompose",
    "principal_sqrt_diagonal",
    "decode_matrix",
    "encode_matrix",
    "load_matrices",
]
