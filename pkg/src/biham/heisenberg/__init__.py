"""
The Heisenberg double and the transfer of its plus bracket.
"""
from .double import (
    DeltaStarFactors,
    DoubleElement,
    DoubleVector,
    embed_cotangent,
    factorize,
    pairing2,
    pb_double,
    to_cotangent,
    transferred_pb_plus,
)

__all__ = [
    "DeltaStarFactors",
    "DoubleElement",
    "DoubleVector",
    "embed_cotangent",
    "factorize",
    "pairing2",
    "pb_double",
    "to_cotangent",
    "transferred_pb_plus",
]
