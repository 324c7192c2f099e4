"""Pair coding with von Neumann scan-and-discard.

Successive non-overlapping pairs of detection outcomes are read left to
right: (click, no click) -> 1, (no click, click) -> 0, anything else is
dropped.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable, Optional

import numpy as np

from .detector import GateRecords

__all__ = [
    "BitStream",
    "ExtractionStats",
    "PairExtractor",
    "pack_bits",
    "unpack_bits",
    "von_neumann_extract",
    "extract_from_gates",
]


@dataclass(frozen=True)
class BitStream:
    """Packed bits, most significant bit first within each byte, zero padded."""

    payload: bytes
    bit_length: int

    def __post_init__(self):
        if self.bit_length < 0 or self.bit_length > 8 * len(self.payload):
            raise ValueError("bit_length does not fit the payload")
        if len(self.payload) != (self.bit_length + 7) // 8:
            raise ValueError("payload has surplus bytes")
        pad = 8 * len(self.payload) - self.bit_length
        if pad and self.payload[-1] & ((1 << pad) - 1):
            raise ValueError("trailing pad bits must be zero")

    def __len__(self) -> int:
        return self.bit_length

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitStream":
        return cls(bytes(data), 8 * len(data))

    def to_array(self) -> np.ndarray:
        return unpack_bits(self)

    def ones(self) -> int:
        # pad bits are zero, so a popcount of the whole payload is exact
        return int(np.unpackbits(np.frombuffer(self.payload, dtype=np.uint8)).sum())


def pack_bits(bits: Iterable[int]) -> BitStream:
    arr = np.asarray(bits if isinstance(bits, np.ndarray) else list(bits), dtype=np.uint8)
    if arr.size and arr.max() > 1:
        raise ValueError("bits must be 0 or 1")
    return BitStream(np.packbits(arr, bitorder="big").tobytes(), int(arr.size))


def unpack_bits(stream: BitStream) -> np.ndarray:
    """Bits of ``stream`` as a uint8 array of 0/1."""
    raw = np.frombuffer(stream.payload, dtype=np.uint8)
    return np.unpackbits(raw, count=stream.bit_length, bitorder="big")


@dataclass
class ExtractionStats:
    gates_applied: int = 0
    pairs_scanned: int = 0
    bits_emitted: int = 0
    ones_emitted: int = 0
    discarded_pairs: int = 0

    @property
    def efficiency(self) -> float:
        """Bits per applied gate (0 when nothing was applied)."""
        return self.bits_emitted / self.gates_applied if self.gates_applied else 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def _code_pairs(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    keep = first != second
    return first[keep].astype(np.uint8)


class PairExtractor:
    """Streaming extractor over chunks of gate records.

    An unpaired trailing outcome is carried into the next chunk, so feeding a
    run in pieces gives the same bits as feeding it whole. With
    ``restart_on_gap`` pairing restarts after every dead-time gap instead of
    letting a pair straddle it.
    """

    def __init__(self, restart_on_gap: bool = False):
        self.restart_on_gap = restart_on_gap
        self.stats = ExtractionStats()
        self._pending: Optional[bool] = None
        self._pending_index = -2

    def feed_clicks(self, clicks, index: Optional[np.ndarray] = None) -> np.ndarray:
        """Consume detection outcomes of applied gates; return the new bits."""
        c = np.asarray(clicks, dtype=bool)
        if self.restart_on_gap and index is None:
            index = np.arange(c.size)
        self.stats.gates_applied += int(c.size)
        if self._pending is not None:
            c = np.concatenate([[self._pending], c])
            if index is not None:
                index = np.concatenate([[self._pending_index], index])
            self._pending = None

        if self.restart_on_gap and c.size:
            # segment = maximal run of consecutively indexed applied gates
            new_seg = np.ones(c.size, dtype=bool)
            new_seg[1:] = np.diff(index) != 1
            seg_start = np.maximum.accumulate(np.where(new_seg, np.arange(c.size), 0))
            pos = np.arange(c.size) - seg_start
            is_first = pos % 2 == 0
            has_partner = np.zeros(c.size, dtype=bool)
            has_partner[:-1] = ~new_seg[1:]
            heads = np.flatnonzero(is_first & has_partner)
            first, second = c[heads], c[heads + 1]
            last = c.size - 1
            if is_first[last]:
                self._pending = bool(c[last])
                self._pending_index = int(index[last])
        else:
            m = c.size // 2
            first, second = c[0 : 2 * m : 2], c[1 : 2 * m : 2]
            if c.size % 2:
                self._pending = bool(c[-1])

        bits = _code_pairs(first, second)
        self.stats.pairs_scanned += int(first.size)
        self.stats.bits_emitted += int(bits.size)
        self.stats.ones_emitted += int(bits.sum())
        self.stats.discarded_pairs += int(first.size - bits.size)
        return bits

    def feed_gates(self, records: GateRecords) -> np.ndarray:
        idx = records.index[records.applied] if self.restart_on_gap else None
        return self.feed_clicks(records.applied_clicks(), idx)


def von_neumann_extract(clicks) -> tuple[BitStream, ExtractionStats]:
    """Extract bits from a sequence of detection outcomes (True = click).

    A trailing unpaired outcome is ignored.
    """
    ex = PairExtractor()
    bits = ex.feed_clicks(np.asarray(list(clicks) if not isinstance(clicks, np.ndarray) else clicks, dtype=bool))
    return pack_bits(bits), ex.stats


def extract_from_gates(records, restart_on_gap: bool = False) -> tuple[BitStream, ExtractionStats]:
    """Extract bits from gate records, ignoring gates suppressed by dead time."""
    if not isinstance(records, GateRecords):
        records = GateRecords.from_records(records)
    ex = PairExtractor(restart_on_gap)
    bits = ex.feed_gates(records)
    return pack_bits(bits), ex.stats
