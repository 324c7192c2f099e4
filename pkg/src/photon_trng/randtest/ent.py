"""ENT-style whole-stream metrics at bit granularity."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ._bits import as_bit_array
from .special import chi2_sf

__all__ = [
    "EntReport",
    "shannon_entropy_per_bit",
    "chi_square_bits",
    "chi_square_bytes",
    "arithmetic_mean",
    "monte_carlo_pi",
    "serial_correlation",
    "ent_report",
]

MC_COORD_BITS = 24


class DegenerateStreamError(ValueError):
    """The statistic is undefined for this input (e.g. zero variance)."""


@dataclass(frozen=True)
class EntReport:
    bit_length: int
    entropy_bits_per_bit: float
    compression_percent: float
    chi_square_stat: float
    chi_square_exceed_prob: float
    arithmetic_mean: float
    monte_carlo_pi: float
    monte_carlo_pi_error_percent: float
    serial_correlation: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def _nonempty(x: np.ndarray) -> np.ndarray:
    if x.size == 0:
        raise ValueError("empty bit stream")
    return x


def shannon_entropy_per_bit(bits) -> float:
    x = _nonempty(as_bit_array(bits))
    p1 = np.count_nonzero(x) / x.size
    h = 0.0
    for p in (1.0 - p1, p1):
        if p > 0:
            h -= p * math.log2(p)
    return h


def chi_square_bits(bits) -> tuple[float, float]:
    """Chi-square of the 0/1 counts against n/2 each (1 dof) and its upper tail."""
    x = as_bit_array(bits)
    n = x.size
    if n < 100:
        raise ValueError(f"chi-square needs at least 100 bits, got {n}")
    ones = int(np.count_nonzero(x))
    expected = n / 2
    stat = ((ones - expected) ** 2 + (n - ones - expected) ** 2) / expected
    return stat, chi2_sf(stat, 1)


def chi_square_bytes(bits) -> tuple[float, float]:
    """Byte-granularity variant: 256 categories, 255 dof; trailing partial byte ignored."""
    x = as_bit_array(bits)
    n_bytes = x.size // 8
    if n_bytes < 256 * 5:
        raise ValueError("byte chi-square needs at least 1280 full bytes")
    values = np.packbits(x[: 8 * n_bytes])
    counts = np.bincount(values, minlength=256)
    expected = n_bytes / 256
    stat = float(((counts - expected) ** 2).sum() / expected)
    return stat, chi2_sf(stat, 255)


def arithmetic_mean(bits) -> float:
    x = _nonempty(as_bit_array(bits))
    return np.count_nonzero(x) / x.size


def monte_carlo_pi(bits) -> tuple[float, int]:
    """Estimate pi from 48-bit chunks read as (x, y) points in the unit square.

    Each coordinate is a 24-bit integer over 2**24; a point is inside when
    x**2 + y**2 <= 1 (closed disk). Leftover bits are ignored.
    """
    x = as_bit_array(bits)
    chunk = 2 * MC_COORD_BITS
    points = x.size // chunk
    if points == 0:
        raise ValueError(f"monte carlo pi needs at least {chunk} bits, got {x.size}")
    raw = np.packbits(x[: points * chunk]).reshape(points, 6).astype(np.int64)
    cx = (raw[:, 0] << 16) | (raw[:, 1] << 8) | raw[:, 2]
    cy = (raw[:, 3] << 16) | (raw[:, 4] << 8) | raw[:, 5]
    inside = int(np.count_nonzero(cx * cx + cy * cy <= 1 << (2 * MC_COORD_BITS)))
    return 4.0 * inside / points, points


def serial_correlation(bits) -> float:
    """Lag-1 serial correlation coefficient, last bit paired with the first."""
    x = as_bit_array(bits)
    n = x.size
    if n < 2:
        raise ValueError("serial correlation needs at least 2 bits")
    s = int(np.count_nonzero(x))
    t1 = int(np.count_nonzero(x[:-1] & x[1:])) + int(x[-1]) * int(x[0])
    # bits are 0/1 so sum of squares equals sum
    denom = n * s - s * s
    if denom == 0:
        raise DegenerateStreamError("serial correlation is undefined for a constant stream")
    return (n * t1 - s * s) / denom


def ent_report(bits) -> EntReport:
    x = as_bit_array(bits)
    h = shannon_entropy_per_bit(x)
    stat, exceed = chi_square_bits(x)
    pi_est, _ = monte_carlo_pi(x)
    try:
        scc = serial_correlation(x)
    except DegenerateStreamError:
        scc = None
    return EntReport(
        bit_length=int(x.size),
        entropy_bits_per_bit=h,
        compression_percent=100.0 * (1.0 - h),
        chi_square_stat=stat,
        chi_square_exceed_prob=exceed,
        arithmetic_mean=arithmetic_mean(x),
        monte_carlo_pi=pi_est,
        monte_carlo_pi_error_percent=100.0 * abs(pi_est - math.pi) / math.pi,
        serial_correlation=scc,
    )
