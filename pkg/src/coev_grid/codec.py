"""
Array Codec

Bit-exact JSON encoding of float64 arrays (base64 of the little-endian
IEEE-754 bytes).
"""

import base64
from typing import Any

import numpy as np

from coev_grid.errors import ProtocolError

WIRE_DTYPE = "<f8"


def encode_array(values: np.ndarray) -> dict[str, Any]:
    """Encode a float array as a JSON-safe dictionary."""
    array = np.ascontiguousarray(values, dtype=WIRE_DTYPE)
    return {
        "dtype": WIRE_DTYPE,
        "shape": list(array.shape),
        "data": base64.b64encode(array.tobytes()).decode("ascii"),
    }


def decode_array(data: dict[str, Any]) -> np.ndarray:
    """Decode an array produced by :func:`encode_array`."""
    try:
        if data["dtype"] != WIRE_DTYPE:
            raise ProtocolError(f"Unsupported dtype {data['dtype']!r}")
        raw = base64.b64decode(data["data"], validate=True)
        shape = tuple(int(n) for n in data["shape"])
        array = np.frombuffer(raw, dtype=WIRE_DTYPE).astype(np.float64)
        return array.reshape(shape)
    except ProtocolError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ProtocolError(f"Malformed array document: {e}") from e
