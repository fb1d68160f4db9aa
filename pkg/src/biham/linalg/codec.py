"""
JSON encoding of complex matrices: {"n": int, "entries": [[[re, im], ...], ...]}.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from .core import ComplexMatrix, as_matrix

logger = logging.getLogger(__name__)


def encode_complex(z: complex) -> List[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(pair: Any) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise ValueError(f"Complex numbers are encoded as [re, im], got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def encode_matrix(X: np.ndarray) -> Dict[str, Any]:
    """Row-major JSON-ready dictionary for a square complex matrix."""
    X = np.asarray(X, dtype=np.complex128)
    return {
        "n": int(X.shape[0]),
        "entries": [[encode_complex(x) for x in row] for row in X],
    }


def decode_matrix(data: Dict[str, Any]) -> ComplexMatrix:
    """Inverse of encode_matrix; validates the declared size."""
    try:
        n = int(data["n"])
        rows = data["entries"]
    except (KeyError, TypeError) as e:
        raise ValueError(f"Malformed matrix record: {e}") from e
    M = np.array([[decode_complex(x) for x in row] for row in rows],
                 dtype=np.complex128)
    if M.shape != (n, n):
        raise ValueError(f"Matrix declares n={n} but has shape {M.shape}")
    return as_matrix(M)


def load_matrices(path: Union[str, Path]) -> Dict[str, ComplexMatrix]:
    """
    Load a JSON file whose top-level values are encoded matrices.

    Args:
        path: File such as {"g": {...}, "L": {...}}

    Returns:
        Mapping from key to decoded matrix
    """
    with open(path, "r") as f:
        payload = json.load(f)
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: expected a JSON object of matrices")
    matrices = {key: decode_matrix(value) for key, value in payload.items()}
    logger.debug(f"Loaded {sorted(matrices)} from {path}")
    return matrices


def dumps(payload: Any) -> str:
    """Compact JSON text; key order is whatever the caller built."""
    return json.dumps(payload, separators=(",", ":"))
