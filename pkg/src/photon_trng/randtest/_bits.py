from __future__ import annotations

import numpy as np

from ..extractor import BitStream, unpack_bits


def as_bit_array(bits) -> np.ndarray:
    """0/1 uint8 view of a BitStream or any 0/1 sequence."""
    if isinstance(bits, BitStream):
        return unpack_bits(bits)
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("bit sequence must be one-dimensional")
    return arr
