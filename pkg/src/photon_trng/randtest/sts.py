"""Frequency, block-frequency and runs tests in their standard closed forms.

``strict=False`` lifts the minimum-length recommendations (100 bits,
blocks of 20) so the formulas can be checked on short textbook vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._bits import as_bit_array
from .special import gammaincc

__all__ = ["PValue", "frequency_monobit", "block_frequency", "runs_test", "DEFAULT_BLOCK_LEN"]

MIN_BITS = 100
MIN_BLOCK_LEN = 20
DEFAULT_BLOCK_LEN = 128


@dataclass(frozen=True)
class PValue:
    value: float
    test_name: str

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"p-value out of [0, 1]: {self.value!r}")

    def __float__(self) -> float:
        return float(self.value)


def _checked(bits, strict: bool) -> np.ndarray:
    x = as_bit_array(bits)
    if x.size == 0 or (strict and x.size < MIN_BITS):
        raise ValueError(f"need at least {MIN_BITS if strict else 1} bits, got {x.size}")
    return x


def frequency_monobit(bits, *, strict: bool = True) -> PValue:
    x = _checked(bits, strict)
    n = x.size
    s = abs(2 * int(np.count_nonzero(x)) - n) / math.sqrt(n)
    return PValue(math.erfc(s / math.sqrt(2)), "monobit")


def block_frequency(bits, block_len: int = DEFAULT_BLOCK_LEN, *, strict: bool = True) -> PValue:
    x = _checked(bits, strict)
    if block_len < 1 or (strict and block_len < MIN_BLOCK_LEN):
        raise ValueError(f"block length too small: {block_len}")
    n_blocks = x.size // block_len
    if n_blocks < 1:
        raise ValueError("stream shorter than one block")
    ones = x[: n_blocks * block_len].reshape(n_blocks, block_len).sum(axis=1, dtype=np.int64)
    # 4M * sum((ones/M - 1/2)^2) == sum((2*ones - M)^2) / M, exact in integers
    chi2 = float(((2 * ones - block_len) ** 2).sum()) / block_len
    return PValue(gammaincc(n_blocks / 2, chi2 / 2), "block_frequency")


def runs_test(bits, *, strict: bool = True) -> PValue:
    """Runs test; p = 0 when the ones fraction fails the frequency prerequisite."""
    x = _checked(bits, strict)
    n = x.size
    pi = np.count_nonzero(x) / n
    if abs(pi - 0.5) >= 2 / math.sqrt(n):
        return PValue(0.0, "runs")
    v = int(np.count_nonzero(x[1:] != x[:-1])) + 1
    num = abs(v - 2 * n * pi * (1 - pi))
    den = 2 * math.sqrt(2 * n) * pi * (1 - pi)
    return PValue(math.erfc(num / den), "runs")
